#include "earl/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "earl/rng.hpp"
#include "earl/sobol.hpp"

namespace earl {
namespace {

Vec4 clip_unit(Vec4 u) {
    for (int d = 0; d < 4; ++d) u[d] = std::clamp(u[d], 0.0, 1.0);
    return u;
}

// Rounds the integer dimension to a representable configuration and returns
// the coordinates that configuration actually maps back to.
Vec4 snap(const Vec4& u, const SearchSpace& space) {
    return to_unit_cube(from_unit_cube(clip_unit(u), space), space);
}

double linf(const Vec4& a, const Vec4& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Greedy coordinate pattern search on EI; step halves whenever a full
// round makes no progress.
Vec4 pattern_search(Vec4 x, const GpModel& model, double r_star) {
    auto ei_at = [&](const Vec4& u) { return expected_improvement(predict(model, u), r_star); };
    double best = ei_at(x);
    double step = 0.05;
    for (int round = 0; round < 20 && step >= 1e-3; ++round) {
        bool improved = false;
        for (int d = 0; d < 4; ++d) {
            for (double sign : {1.0, -1.0}) {
                Vec4 probe = x;
                probe[d] = std::clamp(probe[d] + sign * step, 0.0, 1.0);
                const double v = ei_at(probe);
                if (v > best) {
                    best = v;
                    x = probe;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}

}  // namespace

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(const CandidateStats& stats, double r_star) {
    if (stats.sigma2 < 0.0) throw std::invalid_argument("expected_improvement: sigma2 < 0");
    const double sigma = std::sqrt(stats.sigma2);
    if (sigma == 0.0) return 0.0;
    const double z = (stats.mu - r_star) / sigma;
    const double ei = (stats.mu - r_star) * normal_cdf(z) + sigma * normal_pdf(z);
    return std::max(0.0, ei);
}

std::vector<ProposedCandidate> propose_batch(const GpModel& model, const SearchSpace& space,
                                             const TrialLog& log, const AcquisitionConfig& cfg,
                                             std::uint64_t seed, bool refine) {
    if (cfg.batch_size < 1 || cfg.pool_size < cfg.batch_size || cfg.dup_tolerance <= 0.0)
        throw ConfigError("propose_batch: invalid acquisition configuration");
    if (log.empty()) throw std::invalid_argument("propose_batch: empty trial log");

    const double r_star = update_incumbent(log).best_reward;

    std::vector<Vec4> evaluated;
    evaluated.reserve(log.size());
    for (const TrialRecord& rec : log.records())
        evaluated.push_back(to_unit_cube(rec.config, space));

    SobolStream pool_stream(4, derive_seed(seed, 0x706f6f6cULL) | 1ULL);
    std::vector<Vec4> pool(cfg.pool_size);
    std::vector<double> ei(cfg.pool_size);
    for (int i = 0; i < cfg.pool_size; ++i) {
        pool[i] = pool_stream.next_point();
        ei[i] = expected_improvement(predict(model, pool[i]), r_star);
    }

    std::vector<int> order(cfg.pool_size);
    for (int i = 0; i < cfg.pool_size; ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + cfg.batch_size, order.end(),
                      [&](int a, int b) { return ei[a] != ei[b] ? ei[a] > ei[b] : a < b; });

    Rng jitter_rng(derive_seed(seed, 0x6a6974ULL));
    std::vector<ProposedCandidate> batch;
    batch.reserve(cfg.batch_size);
    for (int k = 0; k < cfg.batch_size; ++k) {
        Vec4 u = pool[order[k]];
        if (refine) u = pattern_search(u, model, r_star);
        u = snap(u, space);

        auto too_close = [&](const Vec4& p) {
            for (const Vec4& e : evaluated)
                if (linf(p, e) <= cfg.dup_tolerance) return true;
            for (const ProposedCandidate& b : batch)
                if (linf(p, b.unit) <= cfg.dup_tolerance) return true;
            return false;
        };

        ProposedCandidate cand;
        if (too_close(u)) {
            bool separated = false;
            for (int attempt = 0; attempt < 10 && !separated; ++attempt) {
                Vec4 shifted = u;
                for (int d = 0; d < 4; ++d) shifted[d] += jitter_rng.normal(0.0, cfg.jitter_sigma);
                shifted = snap(shifted, space);
                if (!too_close(shifted)) {
                    u = shifted;
                    separated = true;
                }
            }
            if (!separated) {
                cand.duplicate = true;
                std::cerr << "warning: batch member " << k
                          << " duplicates an existing point after 10 jitter attempts\n";
            }
        }

        cand.unit = u;
        cand.config = from_unit_cube(u, space);
        cand.stats = predict(model, u);
        batch.push_back(std::move(cand));
    }
    return batch;
}

}  // namespace earl
