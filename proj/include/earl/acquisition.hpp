#pragma once

#include <cstdint>
#include <vector>

#include "earl/gp.hpp"
#include "earl/search_space.hpp"
#include "earl/trial_log.hpp"

namespace earl {

struct AcquisitionConfig {
    int batch_size = 4;           // K
    int pool_size = 4096;
    double dup_tolerance = 1e-3;  // L-inf radius in the unit cube
    double jitter_sigma = 0.01;   // per-dimension duplicate perturbation
};

double normal_pdf(double z);
double normal_cdf(double z);

// Expected gain over the incumbent reward; exactly 0 when the posterior has
// no spread.
double expected_improvement(const CandidateStats& stats, double r_star);

struct ProposedCandidate {
    Configuration config;
    Vec4 unit;            // normalized coordinates the stats were computed at
    CandidateStats stats;
    bool duplicate = false;  // jitter retries exhausted; kept anyway
};

// Top-K expected-improvement points from a freshly scrambled Sobol pool,
// each refined by pattern search and forced apart from evaluated points and
// from one another. refine=false keeps the raw pool optima (used as the
// fallback when the surrogate refit failed and an older model is in play).
std::vector<ProposedCandidate> propose_batch(const GpModel& model, const SearchSpace& space,
                                             const TrialLog& log, const AcquisitionConfig& cfg,
                                             std::uint64_t seed, bool refine = true);

}  // namespace earl
