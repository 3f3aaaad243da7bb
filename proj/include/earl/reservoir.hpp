#pragma once

#include <cstdint>
#include <utility>

#include "earl/search_space.hpp"
#include "earl/types.hpp"

namespace earl {

struct ReservoirWeights {
    SpMat w_rec;                      // N x N recurrent weights, column c holds fan-out of neuron c
    Mat w_in;                         // N x D input weights
    int n_neurons = 0;
    int n_inputs = 0;
    double target_spectral_radius = 0.0;
    double connectivity = 0.0;
    double input_scaling = 1.0;
};

struct ReservoirState {
    Vec x;
    double leak_rate = 0.0;
    long t = 0;
};

struct LifParams {
    double tau_m = 10.0;   // ms
    double v_rest = 0.0;   // mV
    double v_thresh = 1.0; // mV
    double v_reset = 0.0;  // mV
    double dt = 1.0;       // ms

    void validate() const;
};

struct ActivityCounters {
    std::int64_t spikes = 0;
    std::int64_t synaptic_events = 0;
    std::int64_t neuron_steps = 0;
};

// Magnitude of the dominant eigenvalue by power iteration with norm
// renormalization; falls back to averaging the ratio over extra iterations
// when a complex dominant pair keeps the ratio oscillating.
double estimate_spectral_radius(const SpMat& w, int max_iters = 200, double tol = 1e-6);

// Rescales w in place so the power-iteration estimate hits target exactly.
void scale_spectral_radius(SpMat& w, double target);

// Random sparse recurrent weights (Bernoulli mask, uniform values) scaled to
// the requested spectral radius, plus dense uniform input weights.
ReservoirWeights build_weights(const Configuration& config, int n_inputs, std::uint64_t seed);

// One leaky update x' = (1-leak) x + leak tanh(W x + W_in u).
ReservoirState step(const ReservoirState& state, const ReservoirWeights& weights, const Vec& u);

// Runs the reservoir from the zero state over a T x D input sequence and
// returns the T x N state trajectory. Counting: a neuron whose state
// magnitude exceeds spike_threshold after an update contributes one spike
// and one synaptic event per outgoing connection; neuron_steps grows by N
// per timestep.
Mat run_sequence(const ReservoirWeights& weights, double leak, const Mat& inputs,
                 ActivityCounters& counters, double spike_threshold = 0.5);

// Forward-Euler leaky integrate-and-fire update with threshold/reset.
// Returns the new membrane vector and the spike mask.
std::pair<Vec, std::vector<bool>> lif_step(const Vec& v, const LifParams& params,
                                           const Vec& current);

}  // namespace earl
