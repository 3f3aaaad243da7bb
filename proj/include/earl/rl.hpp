#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "earl/adamw.hpp"
#include "earl/gp.hpp"
#include "earl/rng.hpp"
#include "earl/trial_log.hpp"

namespace earl {

// Min-max normalized posterior summary of one candidate batch, interleaved
// as [mu_1, var_1, ..., mu_K, var_K].
struct RlState {
    Vec features;
};

RlState build_state(const std::vector<CandidateStats>& stats);

struct EpsilonSchedule {
    double epsilon = 1.0;
    double kappa = 0.95;
    double epsilon_min = 0.05;
};

struct RlTransition {
    RlState state;
    int action = 0;
    double reward = 0.0;
    RlState next_state;
    bool terminal = false;  // truncated episode: TD target drops the bootstrap term
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity);

    void push(RlTransition tr);
    std::size_t size() const { return entries_.size(); }
    int capacity() const { return capacity_; }
    // index 0 is the oldest surviving transition
    const RlTransition& operator[](std::size_t i) const { return entries_[i]; }

private:
    int capacity_;
    std::deque<RlTransition> entries_;
};

struct QNetConfig {
    int k = 4;
    int hidden = 32;
    double learning_rate = 1e-3;
    double discount = 0.9;       // gamma
    int update_period = 5;       // F: learn + target sync cadence
    std::uint64_t seed = 0;
};

// Small action-value MLP (2K -> hidden -> hidden -> K, tanh) with a delayed
// target copy used for TD bootstrap targets.
class QNetwork {
public:
    explicit QNetwork(const QNetConfig& cfg);

    const QNetConfig& config() const { return cfg_; }
    Vec q_values(const RlState& s) const;         // main network
    Vec q_values_target(const RlState& s) const;
    void sync_target();                            // target := main, bit-exact
    long step_count() const { return steps_; }
    long bump_step() { return ++steps_; }

    // One optimizer step on mean squared TD error; returns mean |delta|.
    double learn(const std::vector<const RlTransition*>& batch);

private:
    struct Mlp {
        Mat w1, w2, w3;
        Vec b1, b2, b3;
    };
    static Vec forward(const Mlp& net, const Vec& x);

    QNetConfig cfg_;
    Mlp main_, target_;
    long steps_ = 0;
    AdamW opt_;
};

// Epsilon-greedy choice over the main network's action values; decays
// epsilon in place after every call.
std::pair<int, SelectedBy> select_action(const QNetwork& q, const RlState& s,
                                         EpsilonSchedule& sched, Rng& rng);

// Appends the transition and, every update_period steps with enough data,
// runs one TD learning step followed by a target sync. Returns mean |TD
// error| when learning happened.
std::optional<double> store_and_learn(QNetwork& q, ReplayBuffer& buf, const RlTransition& tr,
                                      int batch, Rng& rng);

}  // namespace earl
