#include "earl/controller.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>

#include "earl/rng.hpp"
#include "earl/sobol.hpp"

namespace earl {

namespace {

// Seed-derivation tags; arbitrary but fixed so runs are reproducible.
constexpr std::uint64_t kTagTrial = 0x747269616cULL;
constexpr std::uint64_t kTagDesign = 0x64657369676eULL;
constexpr std::uint64_t kTagGpFit = 0x67706669ULL;
constexpr std::uint64_t kTagAcquire = 0x61637175ULL;
constexpr std::uint64_t kTagQNet = 0x716e6574ULL;
constexpr std::uint64_t kTagRlRng = 0x726c726eULL;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void roll_incumbent(Incumbent& inc, const TrialRecord& r) {
    if (r.reward > inc.best_reward) {
        inc.best_reward = r.reward;
        inc.best_index = r.index;
    }
    if (r.objectives.energy_normalized < inc.min_energy) {
        inc.min_energy = r.objectives.energy_normalized;
        inc.min_energy_index = r.index;
    }
}

Incumbent empty_incumbent() {
    Incumbent inc;
    inc.best_reward = -std::numeric_limits<double>::infinity();
    inc.min_energy = std::numeric_limits<double>::infinity();
    inc.best_index = -1;
    inc.min_energy_index = -1;
    return inc;
}

TrialRecord run_one(const RunConfig& cfg, const EvalFn& eval, int index,
                    const Configuration& candidate, Phase phase, SelectedBy selected_by) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, kTagTrial, index);
    const auto t0 = std::chrono::steady_clock::now();
    EvalOutcome out = eval(candidate, index, seed);
    TrialRecord rec;
    rec.index = index;
    rec.config = candidate;
    rec.objectives = out.values;
    rec.reward = compute_reward(out.values, cfg.reward);
    rec.phase = phase;
    rec.selected_by = selected_by;
    // wall time is opt-in so that repeated runs produce byte-identical logs
    rec.wall_time_s = cfg.collect_wall_time ? seconds_since(t0) : 0.0;
    rec.seed = seed;
    return rec;
}

// Evaluates candidates[j] as trial first_index + j, on up to
// cfg.parallel_eval_workers threads; results come back in candidate order.
std::vector<TrialRecord> run_block(const RunConfig& cfg, const EvalFn& eval, int first_index,
                                   const std::vector<Configuration>& candidates, Phase phase,
                                   SelectedBy selected_by) {
    const int n = static_cast<int>(candidates.size());
    std::vector<TrialRecord> recs(n);
    const int workers = std::min(cfg.parallel_eval_workers, n);
    if (workers <= 1) {
        for (int j = 0; j < n; ++j) {
            recs[j] = run_one(cfg, eval, first_index + j, candidates[j], phase, selected_by);
        }
        return recs;
    }
    std::atomic<int> cursor{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int j = cursor.fetch_add(1);
                if (j >= n || failed.load()) return;
                try {
                    recs[j] =
                        run_one(cfg, eval, first_index + j, candidates[j], phase, selected_by);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return recs;
}

}  // namespace

void TerminationConfig::validate() const {
    if (window < 1) throw ConfigError("termination window must be >= 1");
    if (!(reward_tol >= 0.0) || !std::isfinite(reward_tol)) {
        throw ConfigError("termination reward_tol must be finite and >= 0");
    }
    if (!(energy_tol >= 0.0) || !std::isfinite(energy_tol)) {
        throw ConfigError("termination energy_tol must be finite and >= 0");
    }
}

void RlConfig::validate() const {
    if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) throw ConfigError("rl epsilon0 must be in [0, 1]");
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ConfigError("rl kappa must be in (0, 1]");
    if (!(epsilon_min >= 0.0 && epsilon_min <= 1.0)) {
        throw ConfigError("rl epsilon_min must be in [0, 1]");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("rl gamma must be in [0, 1]");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("rl learning rate must be finite and > 0");
    }
    if (capacity < 1) throw ConfigError("rl replay capacity must be >= 1");
    if (batch < 1) throw ConfigError("rl batch size must be >= 1");
    if (update_period < 1) throw ConfigError("rl update period must be >= 1");
    if (hidden < 1) throw ConfigError("rl hidden width must be >= 1");
}

void RunConfig::validate() const {
    if (total_trials < 2) throw ConfigError("total_trials must be >= 2");
    // the surrogate needs at least two observations before the first fit
    if (n_init < 2) throw ConfigError("n_init must be >= 2");
    if (n_init >= total_trials) throw ConfigError("n_init must be < total_trials");
    if (acquisition.batch_size < 1) throw ConfigError("acquisition batch_size must be >= 1");
    if (acquisition.pool_size < acquisition.batch_size) {
        throw ConfigError("acquisition pool_size must be >= batch_size");
    }
    if (!std::isfinite(reward.energy_weight) || reward.energy_weight < 0.0) {
        throw ConfigError("reward energy_weight must be finite and >= 0");
    }
    if (parallel_eval_workers < 1) throw ConfigError("parallel_eval_workers must be >= 1");
    rl.validate();
    termination.validate();
}

TerminationDecision check_termination(const TrialLog& log, const Incumbent& before_window,
                                      const TerminationConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(log.size());
    if (n < cfg.window) return {false, "window not yet full"};
    const int first = n - cfg.window;
    for (int j = first; j < n; ++j) {
        if (log[j].phase != Phase::earl) {
            return {false, "window overlaps the initialization phase"};
        }
    }
    Incumbent inc = before_window;
    for (int j = first; j < n; ++j) {
        const TrialRecord& r = log[j];
        const double delta_reward = r.reward - inc.best_reward;
        if (delta_reward > cfg.reward_tol) {
            return {false, "reward improved within window"};
        }
        const double delta_energy = r.objectives.energy_normalized - inc.min_energy;
        if (delta_energy < -cfg.energy_tol) {
            return {false, "energy improved within window"};
        }
        roll_incumbent(inc, r);
    }
    return {true, "no reward or energy improvement beyond tolerance over the window"};
}

RunResult run_optimization(const RunConfig& cfg, const SearchSpace& space, const EvalFn& eval,
                           const RunHooks& hooks) {
    cfg.validate();
    space.validate();
    if (!eval) throw ConfigError("evaluation function must be callable");
    const auto t_start = std::chrono::steady_clock::now();

    TrialLog log(cfg.reward);
    std::vector<Incumbent> inc_after;  // inc_after[i] covers records 0..i
    inc_after.reserve(cfg.total_trials);
    Incumbent current = empty_incumbent();
    auto commit = [&](const TrialRecord& rec) {
        log.append(rec);
        roll_incumbent(current, rec);
        inc_after.push_back(current);
        if (hooks.on_trial) hooks.on_trial(log.records().back());
    };

    // Phase 1: low-discrepancy initialization.
    {
        std::vector<Configuration> design = generate_initial_design(
            space, cfg.n_init, derive_seed(cfg.master_seed, kTagDesign));
        std::vector<TrialRecord> recs =
            run_block(cfg, eval, 0, design, Phase::sobol, SelectedBy::sobol);
        for (const TrialRecord& r : recs) commit(r);
    }

    // Phase 2: surrogate-guided loop with RL candidate selection.
    const int k = cfg.acquisition.batch_size;
    QNetConfig qcfg;
    qcfg.k = k;
    qcfg.hidden = cfg.rl.hidden;
    qcfg.learning_rate = cfg.rl.learning_rate;
    qcfg.discount = cfg.rl.gamma;
    qcfg.update_period = cfg.rl.update_period;
    qcfg.seed = derive_seed(cfg.master_seed, kTagQNet);
    QNetwork qnet(qcfg);
    ReplayBuffer buffer(cfg.rl.capacity);
    EpsilonSchedule schedule{cfg.rl.epsilon0, cfg.rl.kappa, cfg.rl.epsilon_min};
    Rng rl_rng(derive_seed(cfg.master_seed, kTagRlRng));

    const FitFn fit = hooks.fit_override
                          ? hooks.fit_override
                          : FitFn([](const Mat& x, const Vec& y, std::uint64_t seed,
                                     double jitter_scale) {
                                return fit_gp(x, y, seed, jitter_scale);
                            });

    std::optional<GpModel> prev_model;
    std::optional<RlTransition> pending;
    std::string reason = "budget_exhausted";

    for (int iter = 0; static_cast<int>(log.size()) < cfg.total_trials; ++iter) {
        const int n = static_cast<int>(log.size());
        Mat inputs(n, 4);
        Vec rewards(n);
        for (int i = 0; i < n; ++i) {
            inputs.row(i) = to_unit_cube(log[i].config, space).transpose();
            rewards(i) = log[i].reward;
        }

        const std::uint64_t fit_seed = derive_seed(cfg.master_seed, kTagGpFit, iter);
        const std::uint64_t acq_seed = derive_seed(cfg.master_seed, kTagAcquire, iter);
        std::vector<ProposedCandidate> batch;
        bool fitted = false;
        try {
            GpModel model = fit(inputs, rewards, fit_seed, 1.0);
            prev_model = std::move(model);
            fitted = true;
        } catch (const SurrogateFailure&) {
            try {
                GpModel model = fit(inputs, rewards, fit_seed, 2.0);
                prev_model = std::move(model);
                fitted = true;
            } catch (const SurrogateFailure&) {
                if (!prev_model) throw;  // nothing to fall back to
            }
        }
        // On a double fit failure, take the raw pool optimum under the last
        // usable model instead of refining against a broken fit.
        batch = propose_batch(*prev_model, space, log, cfg.acquisition, acq_seed, fitted);

        std::vector<CandidateStats> stats;
        stats.reserve(batch.size());
        for (const ProposedCandidate& c : batch) stats.push_back(c.stats);
        RlState state = build_state(stats);

        if (pending) {
            pending->next_state = state;
            pending->terminal = false;
            store_and_learn(qnet, buffer, *pending, cfg.rl.batch, rl_rng);
            pending.reset();
        }

        const auto [action, selected_by] = select_action(qnet, state, schedule, rl_rng);

        const int remaining = cfg.total_trials - n;
        double realized = 0.0;
        if (cfg.evaluate_full_batch && remaining >= k) {
            std::vector<Configuration> configs;
            configs.reserve(batch.size());
            for (const ProposedCandidate& c : batch) configs.push_back(c.config);
            std::vector<TrialRecord> recs =
                run_block(cfg, eval, n, configs, Phase::earl, selected_by);
            for (const TrialRecord& r : recs) commit(r);
            realized = recs[static_cast<std::size_t>(action)].reward;
        } else {
            TrialRecord rec =
                run_one(cfg, eval, n, batch[static_cast<std::size_t>(action)].config,
                        Phase::earl, selected_by);
            commit(rec);
            realized = rec.reward;
        }

        pending = RlTransition{state, action, realized, RlState{}, false};

        const int total = static_cast<int>(log.size());
        if (total - cfg.n_init >= cfg.termination.window) {
            const Incumbent& before =
                inc_after[static_cast<std::size_t>(total - cfg.termination.window - 1)];
            TerminationDecision decision = check_termination(log, before, cfg.termination);
            if (decision.stop) {
                reason = "early_termination";
                if (hooks.on_termination) hooks.on_termination(decision.reason);
                break;
            }
        }
    }

    if (pending) {
        // episode ends here: absorbing next state, no bootstrap
        pending->next_state = RlState{Vec::Zero(2 * k)};
        pending->terminal = true;
        store_and_learn(qnet, buffer, *pending, cfg.rl.batch, rl_rng);
    }

    RunResult result;
    result.summary.incumbent = current;
    result.summary.pareto = pareto_front(log);
    result.summary.termination_reason = reason;
    for (const TrialRecord& r : log.records()) {
        if (r.phase == Phase::sobol) {
            ++result.summary.sobol_trials;
        } else {
            ++result.summary.earl_trials;
        }
    }
    result.summary.total_wall_time_s = seconds_since(t_start);
    result.log = std::move(log);
    return result;
}

RunResult run_optimization(const RunConfig& cfg, const SearchSpace& space,
                           const TaskDataset& data, const EvalConfig& eval_cfg,
                           const EnergyModel& energy, const RunHooks& hooks) {
    EvalFn fn = [&](const Configuration& candidate, int /*trial_index*/, std::uint64_t seed) {
        return evaluate(candidate, data, eval_cfg, energy, seed);
    };
    return run_optimization(cfg, space, fn, hooks);
}

}  // namespace earl
