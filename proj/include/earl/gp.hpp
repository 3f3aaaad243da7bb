#pragma once

#include <cstdint>

#include "earl/types.hpp"

namespace earl {

struct KernelParams {
    Vec4 length_scales = Vec4::Ones();  // per-dimension ARD scales
    double signal_variance = 1.0;
    double noise_variance = 1e-6;       // floor enforced at 1e-6
};

struct CandidateStats {
    double mu = 0.0;      // posterior mean, reward units
    double sigma2 = 0.0;  // posterior variance, >= 0
};

// Matern nu=5/2 with ARD distances.
double kernel_eval(const Vec4& a, const Vec4& b, const KernelParams& k);

// Posterior over standardized targets; predictions are de-standardized on
// the way out. The factorization is of K + (noise + jitter) I.
struct GpModel {
    Mat train_inputs;    // n x 4, unit-cube coordinates
    Vec train_targets;   // standardized
    KernelParams kernel;
    Eigen::LLT<Mat> factorization;
    Vec alpha;           // (K + noise I)^-1 targets
    double target_mean = 0.0;
    double target_std = 1.0;
    double jitter = 0.0; // extra diagonal needed to factorize
};

// Log marginal likelihood of standardized targets under the kernel; throws
// SurrogateFailure when the kernel matrix cannot be factorized even with
// jitter escalation.
double gp_log_marginal(const Mat& unit_inputs, const Vec& std_targets,
                       const KernelParams& k, double jitter_scale = 1.0);

// Maximum-likelihood kernel via random multistarts plus coordinate descent.
GpModel fit_gp(const Mat& unit_inputs, const Vec& rewards, std::uint64_t seed,
               double jitter_scale = 1.0);

CandidateStats predict(const GpModel& model, const Vec4& x);

}  // namespace earl
