#include "earl/trial_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "earl/csv.hpp"
#include "earl/types.hpp"

namespace earl {

const char* phase_name(Phase p) {
    return p == Phase::sobol ? "sobol" : "earl";
}

const char* selected_by_name(SelectedBy s) {
    switch (s) {
        case SelectedBy::sobol: return "sobol";
        case SelectedBy::rl_greedy: return "rl_greedy";
        case SelectedBy::rl_random: return "rl_random";
    }
    return "?";
}

Phase parse_phase(const std::string& s) {
    if (s == "sobol") return Phase::sobol;
    if (s == "earl") return Phase::earl;
    throw SchemaError("unknown phase: " + s);
}

SelectedBy parse_selected_by(const std::string& s) {
    if (s == "sobol") return SelectedBy::sobol;
    if (s == "rl_greedy") return SelectedBy::rl_greedy;
    if (s == "rl_random") return SelectedBy::rl_random;
    throw SchemaError("unknown selected_by: " + s);
}

void TrialLog::append(const TrialRecord& rec) {
    if (rec.index != static_cast<int>(records_.size()))
        throw std::invalid_argument("TrialLog::append: index must be " +
                                    std::to_string(records_.size()));
    const double expect = compute_reward(rec.objectives, params_);
    if (std::abs(rec.reward - expect) > 1e-12)
        throw std::invalid_argument("TrialLog::append: reward inconsistent with objectives");
    records_.push_back(rec);
}

Incumbent update_incumbent(const TrialLog& log) {
    if (log.empty())
        throw std::invalid_argument("update_incumbent: empty log");
    Incumbent inc;
    inc.best_reward = -std::numeric_limits<double>::infinity();
    inc.min_energy = std::numeric_limits<double>::infinity();
    for (const TrialRecord& r : log.records()) {
        if (r.reward > inc.best_reward) {
            inc.best_reward = r.reward;
            inc.best_index = r.index;
        }
        if (r.objectives.energy_normalized < inc.min_energy) {
            inc.min_energy = r.objectives.energy_normalized;
            inc.min_energy_index = r.index;
        }
    }
    return inc;
}

std::vector<int> pareto_front(const TrialLog& log) {
    if (log.empty())
        throw std::invalid_argument("pareto_front: empty log");
    const auto& recs = log.records();
    std::vector<int> order(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& oa = recs[a].objectives;
        const auto& ob = recs[b].objectives;
        if (oa.accuracy != ob.accuracy) return oa.accuracy > ob.accuracy;
        if (oa.energy_pj_per_sample != ob.energy_pj_per_sample)
            return oa.energy_pj_per_sample < ob.energy_pj_per_sample;
        return a < b;
    });

    // One pass over accuracy groups in descending order. A point is on the
    // front iff it has the group's minimum energy and that energy is below
    // the best energy among all strictly more accurate points.
    std::vector<int> front;
    double best_higher = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        const double acc = recs[order[i]].objectives.accuracy;
        std::size_t j = i;
        while (j < order.size() && recs[order[j]].objectives.accuracy == acc) ++j;
        const double group_min = recs[order[i]].objectives.energy_pj_per_sample;
        for (std::size_t k = i; k < j; ++k) {
            const auto& o = recs[order[k]].objectives;
            if (o.energy_pj_per_sample == group_min && group_min < best_higher)
                front.push_back(order[k]);
        }
        best_higher = std::min(best_higher, group_min);
        i = j;
    }
    return front;
}

const char* const kTrialCsvHeader =
    "trial_index,phase,selected_by,reservoir_size,connectivity,spectral_radius,"
    "leak_rate,accuracy,energy_pj_per_sample,energy_normalized,reward,wall_time_s,seed";

void write_trial_row(std::ostream& out, const TrialRecord& r) {
    out << r.index << ',' << phase_name(r.phase) << ',' << selected_by_name(r.selected_by) << ','
        << r.config.reservoir_size << ',' << csv::format_double(r.config.connectivity) << ','
        << csv::format_double(r.config.spectral_radius) << ','
        << csv::format_double(r.config.leak_rate) << ','
        << csv::format_double(r.objectives.accuracy) << ','
        << csv::format_double(r.objectives.energy_pj_per_sample) << ','
        << csv::format_double(r.objectives.energy_normalized) << ','
        << csv::format_double(r.reward) << ',' << csv::format_double(r.wall_time_s) << ','
        << r.seed << '\n';
}

void write_trial_csv(const TrialLog& log, std::ostream& out) {
    out << kTrialCsvHeader << '\n';
    for (const TrialRecord& r : log.records()) write_trial_row(out, r);
}

void write_trial_csv(const TrialLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_trial_csv(log, out);
    if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

TrialLog read_trial_csv(const std::string& path, RewardParams params) {
    const csv::Table table = csv::read_file(path);
    std::string header;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) header += ',';
        header += table.header[i];
    }
    if (header != kTrialCsvHeader)
        throw SchemaError("unexpected trial CSV header in " + path);

    TrialLog log(params);
    for (const auto& row : table.rows) {
        if (row.size() != 13) throw SchemaError("trial CSV row has wrong field count");
        TrialRecord r;
        r.index = std::stoi(row[0]);
        r.phase = parse_phase(row[1]);
        r.selected_by = parse_selected_by(row[2]);
        r.config.reservoir_size = std::stoi(row[3]);
        r.config.connectivity = std::stod(row[4]);
        r.config.spectral_radius = std::stod(row[5]);
        r.config.leak_rate = std::stod(row[6]);
        r.objectives.accuracy = std::stod(row[7]);
        r.objectives.energy_pj_per_sample = std::stod(row[8]);
        r.objectives.energy_normalized = std::stod(row[9]);
        r.reward = std::stod(row[10]);
        r.wall_time_s = std::stod(row[11]);
        r.seed = std::stoull(row[12]);
        log.append(r);
    }
    return log;
}

}  // namespace earl
