#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "earl/objectives.hpp"
#include "earl/search_space.hpp"

namespace earl {

enum class Phase { sobol, earl };
enum class SelectedBy { sobol, rl_greedy, rl_random };

const char* phase_name(Phase p);
const char* selected_by_name(SelectedBy s);
Phase parse_phase(const std::string& s);
SelectedBy parse_selected_by(const std::string& s);

struct TrialRecord {
    int index = 0;
    Configuration config;
    ObjectiveValues objectives;
    double reward = 0.0;
    Phase phase = Phase::sobol;
    SelectedBy selected_by = SelectedBy::sobol;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
};

// Append-only record of every evaluation made during a run. Indices are
// dense 0..n-1; each record's reward must match its objectives under the
// log's reward params.
class TrialLog {
public:
    explicit TrialLog(RewardParams params = {}) : params_(params) {}

    void append(const TrialRecord& rec);
    const std::vector<TrialRecord>& records() const { return records_; }
    const RewardParams& reward_params() const { return params_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const TrialRecord& operator[](std::size_t i) const { return records_[i]; }

private:
    std::vector<TrialRecord> records_;
    RewardParams params_;
};

// Best reward and lowest normalized energy seen so far, with the trials
// that achieved them (earliest on ties).
struct Incumbent {
    double best_reward = 0.0;
    double min_energy = 0.0;
    int best_index = -1;
    int min_energy_index = -1;
};

Incumbent update_incumbent(const TrialLog& log);

// Indices of the non-dominated records under (maximize accuracy, minimize
// raw pJ/sample energy), strict dominance, sorted by descending accuracy.
// Records with identical objective pairs are all retained.
std::vector<int> pareto_front(const TrialLog& log);

extern const char* const kTrialCsvHeader;

void write_trial_row(std::ostream& out, const TrialRecord& r);
void write_trial_csv(const TrialLog& log, std::ostream& out);
void write_trial_csv(const TrialLog& log, const std::string& path);
TrialLog read_trial_csv(const std::string& path, RewardParams params);

}  // namespace earl
