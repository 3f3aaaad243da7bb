#include "earl/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "earl/reservoir.hpp"
#include "earl/rng.hpp"

namespace earl {

void EnergyModel::validate() const {
    if (e_spike < 0.0 || e_syn < 0.0 || e_leak < 0.0)
        throw ConfigError("EnergyModel: coefficients must be non-negative");
    if (!(reference_energy > 0.0))
        throw ConfigError("EnergyModel: reference_energy must be positive");
}

ReadoutKind parse_readout_kind(const std::string& s) {
    if (s == "gru") return ReadoutKind::gru;
    if (s == "ridge") return ReadoutKind::ridge;
    throw ConfigError("unknown readout kind: " + s);
}

const char* readout_kind_name(ReadoutKind k) {
    return k == ReadoutKind::gru ? "gru" : "ridge";
}

double reference_energy_for(const SearchSpace& space, int t, int d, const EnergyModel& energy) {
    (void)d;  // input events carry no cost in this model
    const double n_max = space.size_range.hi;
    const double conn_max = space.conn_range.hi;
    return (energy.e_spike * n_max + energy.e_syn * n_max * n_max * conn_max +
            energy.e_leak * n_max) *
           t;
}

EvalOutcome evaluate(const Configuration& config, const TaskDataset& data,
                     const EvalConfig& eval_cfg, const EnergyModel& energy,
                     std::uint64_t trial_seed) {
    energy.validate();
    if (data.features.empty()) throw std::invalid_argument("evaluate: empty dataset");
    const int s_total = static_cast<int>(data.features.size());
    const int d = data.n_features();

    EvalOutcome out;
    try {
        const std::uint64_t reservoir_seed =
            derive_seed(eval_cfg.master_seed, 0x72657376ULL, trial_seed);
        const ReservoirWeights weights = build_weights(config, d, reservoir_seed);

        ActivityCounters counters;
        const bool use_gru = eval_cfg.readout == ReadoutKind::gru;
        std::vector<Mat> trajectories;
        Mat finals(s_total, config.reservoir_size);
        if (use_gru) trajectories.reserve(data.features.size());
        for (int i = 0; i < s_total; ++i) {
            Mat traj = run_sequence(weights, config.leak_rate, data.features[i], counters,
                                    eval_cfg.spike_threshold);
            finals.row(i) = traj.row(traj.rows() - 1);
            if (use_gru) trajectories.push_back(std::move(traj));
        }

        int correct = 0;
        if (use_gru) {
            std::vector<Mat> train_states;
            std::vector<int> train_labels;
            for (int i : data.train_idx) {
                train_states.push_back(trajectories[i]);
                train_labels.push_back(data.labels[i]);
            }
            TrainSpec spec = eval_cfg.train_spec;
            spec.seed = derive_seed(eval_cfg.master_seed, 0x67727574ULL, trial_seed);
            const GruParams init =
                init_gru(config.reservoir_size, 32, data.class_count,
                         derive_seed(eval_cfg.master_seed, 0x67727569ULL, trial_seed));
            const GruTrainResult trained = train_gru(init, train_states, train_labels, spec);
            for (int i : data.val_idx)
                if (gru_predict(trained.params, trajectories[i]) == data.labels[i]) ++correct;
        } else {
            Mat train_finals(data.train_idx.size(), config.reservoir_size);
            std::vector<int> train_labels;
            for (std::size_t r = 0; r < data.train_idx.size(); ++r) {
                train_finals.row(static_cast<Eigen::Index>(r)) = finals.row(data.train_idx[r]);
                train_labels.push_back(data.labels[data.train_idx[r]]);
            }
            const RidgeReadout readout = ridge_readout(train_finals, train_labels, 1e-2);
            for (int i : data.val_idx)
                if (readout.predict(finals.row(i).transpose()) == data.labels[i]) ++correct;
        }

        out.values.accuracy = static_cast<double>(correct) / data.val_idx.size();
        out.values.energy_pj_per_sample =
            (energy.e_spike * counters.spikes + energy.e_syn * counters.synaptic_events +
             energy.e_leak * counters.neuron_steps) /
            s_total;
        out.values.energy_normalized =
            std::min(1.0, out.values.energy_pj_per_sample / energy.reference_energy);
    } catch (const DegenerateReservoirError& e) {
        out = {{0.0, energy.reference_energy, 1.0}, true, e.what()};
    } catch (const TrainingFailure& e) {
        out = {{0.0, energy.reference_energy, 1.0}, true, e.what()};
    } catch (const NumericFailure& e) {
        out = {{0.0, energy.reference_energy, 1.0}, true, e.what()};
    }
    return out;
}

}  // namespace earl
