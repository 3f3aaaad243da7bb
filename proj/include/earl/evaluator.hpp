#pragma once

#include <cstdint>
#include <string>

#include "earl/dataset.hpp"
#include "earl/objectives.hpp"
#include "earl/readout.hpp"
#include "earl/search_space.hpp"

namespace earl {

struct EnergyModel {
    double e_spike = 1.0;          // pJ per spike
    double e_syn = 0.1;            // pJ per synaptic event
    double e_leak = 0.01;          // pJ per neuron-step
    double reference_energy = 1.0; // pJ/sample normalization denominator

    void validate() const;
};

enum class ReadoutKind { gru, ridge };

ReadoutKind parse_readout_kind(const std::string& s);
const char* readout_kind_name(ReadoutKind k);

struct EvalConfig {
    ReadoutKind readout = ReadoutKind::gru;
    TrainSpec train_spec;
    double spike_threshold = 0.5;
    std::uint64_t master_seed = 42;
};

// Evaluation failures surface as a worst-corner sentinel with the flag set,
// so the optimizer records them as observed bad points and keeps going.
struct EvalOutcome {
    ObjectiveValues values;
    bool failed = false;
    std::string message;
};

// Analytic worst case of the energy model over the space: every neuron of
// the largest reservoir spiking each step with maximum fan-out.
double reference_energy_for(const SearchSpace& space, int t, int d, const EnergyModel& energy);

EvalOutcome evaluate(const Configuration& config, const TaskDataset& data,
                     const EvalConfig& eval_cfg, const EnergyModel& energy,
                     std::uint64_t trial_seed = 0);

}  // namespace earl
