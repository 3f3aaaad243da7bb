#include "earl/reservoir.hpp"

#include <cmath>
#include <iostream>
#include <vector>

#include "earl/rng.hpp"

namespace earl {

void LifParams::validate() const {
    if (tau_m <= 0.0 || dt <= 0.0) throw ConfigError("LifParams: tau_m and dt must be positive");
    if (v_thresh <= v_reset) throw ConfigError("LifParams: v_thresh must exceed v_reset");
    if (dt >= 2.0 * tau_m)
        throw ConfigError("LifParams: dt >= 2*tau_m makes the Euler update unstable");
    if (dt >= tau_m)
        std::cerr << "warning: LIF integration step dt >= tau_m; expect poor accuracy\n";
}

double estimate_spectral_radius(const SpMat& w, int max_iters, double tol) {
    if (w.rows() != w.cols()) throw std::invalid_argument("spectral radius needs a square matrix");
    if (w.rows() == 0 || w.nonZeros() == 0) return 0.0;

    Rng rng(0x5eedu);
    Vec x(w.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
    x.normalize();

    double ratio = 0.0, prev = -1.0;
    for (int k = 0; k < max_iters; ++k) {
        Vec y = w * x;
        ratio = y.norm();
        if (ratio == 0.0) return 0.0;  // start vector fell in the kernel chain
        x = y / ratio;
        if (prev >= 0.0 && std::abs(ratio - prev) <= tol * std::max(1.0, ratio)) return ratio;
        prev = ratio;
    }

    // Oscillating ratio: average it over a further stretch of iterations.
    double acc = 0.0;
    const int extra = 50;
    for (int k = 0; k < extra; ++k) {
        Vec y = w * x;
        const double r = y.norm();
        if (r == 0.0) return 0.0;
        x = y / r;
        acc += r;
    }
    return acc / extra;
}

void scale_spectral_radius(SpMat& w, double target) {
    const double est = estimate_spectral_radius(w);
    if (est <= 0.0)
        throw DegenerateReservoirError("cannot scale: spectral radius estimate is zero");
    w *= target / est;
}

ReservoirWeights build_weights(const Configuration& config, int n_inputs, std::uint64_t seed) {
    if (n_inputs < 1) throw std::invalid_argument("build_weights: n_inputs must be >= 1");
    const int n = config.reservoir_size;
    if (n < 1) throw std::invalid_argument("build_weights: reservoir_size must be >= 1");

    ReservoirWeights w;
    w.n_neurons = n;
    w.n_inputs = n_inputs;
    w.target_spectral_radius = config.spectral_radius;
    w.connectivity = config.connectivity;
    w.input_scaling = 1.0;

    Rng rec_rng(derive_seed(seed, 0x77726563ULL));
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(config.connectivity * n * double(n) * 1.1) + 16);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r)
            if (rec_rng.uniform01() < config.connectivity)
                entries.emplace_back(r, c, rec_rng.uniform(-1.0, 1.0));
    if (entries.empty())
        throw DegenerateReservoirError("recurrent matrix sampled no connections");

    w.w_rec = SpMat(n, n);
    w.w_rec.setFromTriplets(entries.begin(), entries.end());
    w.w_rec.makeCompressed();
    scale_spectral_radius(w.w_rec, config.spectral_radius);

    Rng in_rng(derive_seed(seed, 0x77696eULL));
    w.w_in = Mat(n, n_inputs);
    for (int c = 0; c < n_inputs; ++c)
        for (int r = 0; r < n; ++r) w.w_in(r, c) = in_rng.uniform(-1.0, 1.0) * w.input_scaling;
    return w;
}

ReservoirState step(const ReservoirState& state, const ReservoirWeights& weights, const Vec& u) {
    if (state.x.size() != weights.n_neurons)
        throw std::invalid_argument("step: state dimension mismatch");
    if (u.size() != weights.n_inputs)
        throw std::invalid_argument("step: input dimension mismatch");
    ReservoirState next;
    next.leak_rate = state.leak_rate;
    next.t = state.t + 1;
    const Vec pre = weights.w_rec * state.x + weights.w_in * u;
    next.x = (1.0 - state.leak_rate) * state.x + state.leak_rate * pre.array().tanh().matrix();
    return next;
}

Mat run_sequence(const ReservoirWeights& weights, double leak, const Mat& inputs,
                 ActivityCounters& counters, double spike_threshold) {
    if (inputs.rows() < 1) throw std::invalid_argument("run_sequence: empty input sequence");
    if (inputs.cols() != weights.n_inputs)
        throw std::invalid_argument("run_sequence: input dimension mismatch");

    const int n = weights.n_neurons;
    const long T = inputs.rows();

    // Fan-out per neuron: nonzeros in its column (x is the source side of W x).
    std::vector<std::int64_t> out_degree(n);
    for (int c = 0; c < n; ++c)
        out_degree[c] = weights.w_rec.outerIndexPtr()[c + 1] - weights.w_rec.outerIndexPtr()[c];

    Mat traj(T, n);
    Vec x = Vec::Zero(n);
    Vec pre(n);
    for (long t = 0; t < T; ++t) {
        pre.noalias() = weights.w_rec * x;
        pre.noalias() += weights.w_in * inputs.row(t).transpose();
        x = (1.0 - leak) * x + leak * pre.array().tanh().matrix();
        if (!x.allFinite())
            throw NumericFailure("run_sequence: state diverged at step " + std::to_string(t));
        traj.row(t) = x.transpose();
        counters.neuron_steps += n;
        for (int i = 0; i < n; ++i) {
            if (std::abs(x[i]) > spike_threshold) {
                ++counters.spikes;
                counters.synaptic_events += out_degree[i];
            }
        }
    }
    return traj;
}

std::pair<Vec, std::vector<bool>> lif_step(const Vec& v, const LifParams& params,
                                           const Vec& current) {
    params.validate();
    if (v.size() != current.size())
        throw std::invalid_argument("lif_step: dimension mismatch");
    Vec next = v + (params.dt / params.tau_m) *
                       ((params.v_rest - v.array()).matrix() + current);
    std::vector<bool> spiked(static_cast<std::size_t>(v.size()), false);
    for (Eigen::Index i = 0; i < next.size(); ++i) {
        if (next[i] >= params.v_thresh) {
            spiked[static_cast<std::size_t>(i)] = true;
            next[i] = params.v_reset;
        }
    }
    return {std::move(next), std::move(spiked)};
}

}  // namespace earl
