#pragma once

#include <cmath>
#include <stdexcept>

namespace earl {

// Raw outcomes of one trial evaluation. energy_normalized is the energy
// objective on [0,1] after division by the reference budget; energy_pj is
// the unscaled estimate in picojoules per sample.
struct ObjectiveValues {
    double accuracy = 0.0;
    double energy_pj_per_sample = 0.0;
    double energy_normalized = 0.0;
};

struct RewardParams {
    double energy_weight = 0.5;
};

// Scalarized reward: accuracy minus weighted normalized energy.
inline double compute_reward(double acc, double energy_norm, const RewardParams& p) {
    if (!std::isfinite(acc) || !std::isfinite(energy_norm))
        throw std::invalid_argument("compute_reward: non-finite objective value");
    if (!std::isfinite(p.energy_weight) || p.energy_weight < 0.0)
        throw std::invalid_argument("compute_reward: energy_weight must be finite and >= 0");
    return acc - p.energy_weight * energy_norm;
}

inline double compute_reward(const ObjectiveValues& v, const RewardParams& p) {
    return compute_reward(v.accuracy, v.energy_normalized, p);
}

}  // namespace earl
