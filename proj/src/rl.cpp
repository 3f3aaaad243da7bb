#include "earl/rl.hpp"

#include <cmath>

namespace earl {

RlState build_state(const std::vector<CandidateStats>& stats) {
    if (stats.empty()) throw std::invalid_argument("build_state: empty batch");
    const int k = static_cast<int>(stats.size());
    double mu_lo = stats[0].mu, mu_hi = stats[0].mu;
    double v_lo = stats[0].sigma2, v_hi = stats[0].sigma2;
    for (const CandidateStats& s : stats) {
        mu_lo = std::min(mu_lo, s.mu);
        mu_hi = std::max(mu_hi, s.mu);
        v_lo = std::min(v_lo, s.sigma2);
        v_hi = std::max(v_hi, s.sigma2);
    }
    auto scale = [](double v, double lo, double hi) {
        return hi == lo ? 0.5 : (v - lo) / (hi - lo);
    };
    RlState out;
    out.features.resize(2 * k);
    for (int j = 0; j < k; ++j) {
        out.features[2 * j] = scale(stats[j].mu, mu_lo, mu_hi);
        out.features[2 * j + 1] = scale(stats[j].sigma2, v_lo, v_hi);
    }
    return out;
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw ConfigError("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push(RlTransition tr) {
    if (static_cast<int>(entries_.size()) == capacity_) entries_.pop_front();
    entries_.push_back(std::move(tr));
}

QNetwork::QNetwork(const QNetConfig& cfg)
    : cfg_(cfg), opt_({cfg.learning_rate, 0.9, 0.999, 1e-8, /*weight_decay=*/0.0}) {
    if (cfg.k < 1 || cfg.hidden < 1 || cfg.update_period < 1)
        throw ConfigError("QNetwork: invalid configuration");
    Rng rng(derive_seed(cfg.seed, 0x716e6574ULL));
    auto fill = [&](Mat& m, int rows, int cols) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        m.resize(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-bound, bound);
    };
    fill(main_.w1, cfg.hidden, 2 * cfg.k);
    fill(main_.w2, cfg.hidden, cfg.hidden);
    fill(main_.w3, cfg.k, cfg.hidden);
    main_.b1 = Vec::Zero(cfg.hidden);
    main_.b2 = Vec::Zero(cfg.hidden);
    main_.b3 = Vec::Zero(cfg.k);
    target_ = main_;
}

Vec QNetwork::forward(const Mlp& net, const Vec& x) {
    const Vec a1 = (net.w1 * x + net.b1).array().tanh().matrix();
    const Vec a2 = (net.w2 * a1 + net.b2).array().tanh().matrix();
    return net.w3 * a2 + net.b3;
}

Vec QNetwork::q_values(const RlState& s) const {
    if (s.features.size() != 2 * cfg_.k)
        throw std::invalid_argument("QNetwork: state dimension mismatch");
    return forward(main_, s.features);
}

Vec QNetwork::q_values_target(const RlState& s) const {
    if (s.features.size() != 2 * cfg_.k)
        throw std::invalid_argument("QNetwork: state dimension mismatch");
    return forward(target_, s.features);
}

void QNetwork::sync_target() { target_ = main_; }

double QNetwork::learn(const std::vector<const RlTransition*>& batch) {
    if (batch.empty()) throw std::invalid_argument("QNetwork::learn: empty batch");
    const double inv_b = 1.0 / batch.size();

    Mat gw1 = Mat::Zero(main_.w1.rows(), main_.w1.cols());
    Mat gw2 = Mat::Zero(main_.w2.rows(), main_.w2.cols());
    Mat gw3 = Mat::Zero(main_.w3.rows(), main_.w3.cols());
    Vec gb1 = Vec::Zero(main_.b1.size());
    Vec gb2 = Vec::Zero(main_.b2.size());
    Vec gb3 = Vec::Zero(main_.b3.size());

    double abs_delta = 0.0;
    for (const RlTransition* tr : batch) {
        const Vec& x = tr->state.features;
        const Vec a1 = (main_.w1 * x + main_.b1).array().tanh().matrix();
        const Vec a2 = (main_.w2 * a1 + main_.b2).array().tanh().matrix();
        const Vec q = main_.w3 * a2 + main_.b3;

        double target = tr->reward;
        if (!tr->terminal)
            target += cfg_.discount * forward(target_, tr->next_state.features).maxCoeff();
        const double delta = target - q[tr->action];
        abs_delta += std::abs(delta);

        // d/dtheta of (1/B) sum delta^2
        Vec dq = Vec::Zero(cfg_.k);
        dq[tr->action] = -2.0 * delta * inv_b;
        gw3 += dq * a2.transpose();
        gb3 += dq;
        const Vec da2 =
            (main_.w3.transpose() * dq).cwiseProduct((1.0 - a2.array().square()).matrix());
        gw2 += da2 * a1.transpose();
        gb2 += da2;
        const Vec da1 =
            (main_.w2.transpose() * da2).cwiseProduct((1.0 - a1.array().square()).matrix());
        gw1 += da1 * x.transpose();
        gb1 += da1;
    }

    opt_.begin_step();
    opt_.update(main_.w1, gw1, 0);
    opt_.update(main_.b1, gb1, 1);
    opt_.update(main_.w2, gw2, 2);
    opt_.update(main_.b2, gb2, 3);
    opt_.update(main_.w3, gw3, 4);
    opt_.update(main_.b3, gb3, 5);
    return abs_delta * inv_b;
}

std::pair<int, SelectedBy> select_action(const QNetwork& q, const RlState& s,
                                         EpsilonSchedule& sched, Rng& rng) {
    const int k = q.config().k;
    int action;
    SelectedBy mode;
    if (rng.uniform01() < sched.epsilon) {
        action = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
        mode = SelectedBy::rl_random;
    } else {
        const Vec values = q.q_values(s);
        action = 0;
        for (int j = 1; j < k; ++j)
            if (values[j] > values[action]) action = j;
        mode = SelectedBy::rl_greedy;
    }
    sched.epsilon = std::max(sched.kappa * sched.epsilon, sched.epsilon_min);
    return {action, mode};
}

std::optional<double> store_and_learn(QNetwork& q, ReplayBuffer& buf, const RlTransition& tr,
                                      int batch, Rng& rng) {
    if (batch < 1) throw std::invalid_argument("store_and_learn: batch must be >= 1");
    buf.push(tr);
    const long step = q.bump_step();
    if (step % q.config().update_period != 0 || buf.size() < static_cast<std::size_t>(batch))
        return std::nullopt;

    std::vector<const RlTransition*> sample;
    sample.reserve(batch);
    for (int i = 0; i < batch; ++i)
        sample.push_back(&buf[rng.uniform_int(buf.size())]);
    const double mean_abs_delta = q.learn(sample);
    q.sync_target();
    return mean_abs_delta;
}

}  // namespace earl
