#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "earl/acquisition.hpp"
#include "earl/evaluator.hpp"
#include "earl/gp.hpp"
#include "earl/rl.hpp"
#include "earl/search_space.hpp"
#include "earl/trial_log.hpp"

namespace earl {

struct TerminationConfig {
    int window = 10;          // T_s
    double reward_tol = 1e-3; // eps_r
    double energy_tol = 1e-3; // eps_e

    void validate() const;
};

struct RlConfig {
    double epsilon0 = 1.0;
    double kappa = 0.95;
    double epsilon_min = 0.05;
    double gamma = 0.9;
    double learning_rate = 1e-3;
    int capacity = 256;
    int batch = 16;
    int update_period = 5;  // F
    int hidden = 32;

    void validate() const;
};

struct RunConfig {
    int total_trials = 50;
    int n_init = 20;
    AcquisitionConfig acquisition;
    RewardParams reward;
    RlConfig rl;
    TerminationConfig termination;
    std::uint64_t master_seed = 42;
    bool evaluate_full_batch = false;
    int parallel_eval_workers = 1;
    bool collect_wall_time = false;  // keeps logs bit-reproducible when off

    void validate() const;
};

using EvalFn =
    std::function<EvalOutcome(const Configuration&, int trial_index, std::uint64_t trial_seed)>;
using FitFn = std::function<GpModel(const Mat&, const Vec&, std::uint64_t, double)>;

struct RunHooks {
    std::function<void(const TrialRecord&)> on_trial;
    std::function<void(const std::string&)> on_termination;
    FitFn fit_override;  // test seam; production uses fit_gp
};

struct RunSummary {
    Incumbent incumbent;
    std::vector<int> pareto;
    std::string termination_reason;  // "budget_exhausted" or "early_termination"
    int sobol_trials = 0;
    int earl_trials = 0;
    double total_wall_time_s = 0.0;
};

struct RunResult {
    TrialLog log;
    RunSummary summary;
};

struct TerminationDecision {
    bool stop = false;
    std::string reason;
};

// Examines the last `window` trials (all must be past the Sobol phase):
// stop when none of them beat the reward incumbent by more than reward_tol
// nor undercut the energy incumbent by more than energy_tol, with both
// incumbents frozen as of just before each trial. before_window must cover
// exactly the records preceding the window.
TerminationDecision check_termination(const TrialLog& log, const Incumbent& before_window,
                                      const TerminationConfig& cfg);

RunResult run_optimization(const RunConfig& cfg, const SearchSpace& space, const EvalFn& eval,
                           const RunHooks& hooks = {});

// Convenience wrapper evaluating against a dataset with the built-in
// reservoir + readout pipeline.
RunResult run_optimization(const RunConfig& cfg, const SearchSpace& space,
                           const TaskDataset& data, const EvalConfig& eval_cfg,
                           const EnergyModel& energy, const RunHooks& hooks = {});

}  // namespace earl
