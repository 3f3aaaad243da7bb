#include "earl/gp.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "earl/rng.hpp"

namespace earl {
namespace {

constexpr double kSqrt5 = 2.23606797749978969;
constexpr double kLog2Pi = 1.83787706640934548;

// Search boxes for kernel hyperparameters, in natural units.
constexpr double kLenLo = 0.05, kLenHi = 5.0;
constexpr double kSigLo = 0.1, kSigHi = 10.0;
constexpr double kNoiseLo = 1e-6, kNoiseHi = 1e-1;

Mat kernel_matrix(const Mat& x, const KernelParams& k) {
    const Eigen::Index n = x.rows();
    Mat out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = k.signal_variance + k.noise_variance;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = kernel_eval(x.row(i).transpose(), x.row(j).transpose(), k);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

// Cholesky with escalating diagonal jitter; throws once the jitter budget
// is exhausted.
Eigen::LLT<Mat> factorize(const Mat& kmat, double jitter_scale, double& jitter_used) {
    double jitter = 0.0;
    for (;;) {
        Mat shifted = kmat;
        if (jitter > 0.0) shifted.diagonal().array() += jitter;
        Eigen::LLT<Mat> llt(shifted);
        if (llt.info() == Eigen::Success) {
            jitter_used = jitter;
            return llt;
        }
        if (jitter == 0.0)
            jitter = jitter_scale * 1e-9;
        else if (jitter < jitter_scale * 1e-3)
            jitter *= 10.0;
        else
            throw SurrogateFailure("kernel matrix factorization failed at max jitter");
    }
}

double log_marginal_impl(const Mat& x, const Vec& y, const KernelParams& k,
                         double jitter_scale) {
    double jitter = 0.0;
    const Eigen::LLT<Mat> llt = factorize(kernel_matrix(x, k), jitter_scale, jitter);
    const Vec alpha = llt.solve(y);
    double logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i));
    return -0.5 * y.dot(alpha) - logdet - 0.5 * y.size() * kLog2Pi;
}

struct LogCoords {
    // log(length_scales[0..3]), log(signal), log(noise)
    std::array<double, 6> v;

    KernelParams params() const {
        KernelParams k;
        for (int d = 0; d < 4; ++d) k.length_scales[d] = std::exp(v[d]);
        k.signal_variance = std::exp(v[4]);
        k.noise_variance = std::max(std::exp(v[5]), kNoiseLo);
        return k;
    }
};

// Golden-section maximization over one coordinate of the log-parameter box.
double golden_section(LogCoords& c, int coord, double lo, double hi,
                      const Mat& x, const Vec& y, double jitter_scale, double current_best) {
    auto eval = [&](double t) {
        LogCoords probe = c;
        probe.v[coord] = t;
        try {
            return log_marginal_impl(x, y, probe.params(), jitter_scale);
        } catch (const SurrogateFailure&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    double best_t = f1 >= f2 ? x1 : x2;
    double best_f = std::max(f1, f2);
    for (int it = 0; it < 25; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
            if (f2 > best_f) { best_f = f2; best_t = x2; }
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
            if (f1 > best_f) { best_f = f1; best_t = x1; }
        }
    }
    if (best_f > current_best) {
        c.v[coord] = best_t;
        return best_f;
    }
    return current_best;
}

}  // namespace

double kernel_eval(const Vec4& a, const Vec4& b, const KernelParams& k) {
    double r2 = 0.0;
    for (int d = 0; d < 4; ++d) {
        const double diff = (a[d] - b[d]) / k.length_scales[d];
        r2 += diff * diff;
    }
    const double r = std::sqrt(r2);
    return k.signal_variance * (1.0 + kSqrt5 * r + 5.0 * r2 / 3.0) * std::exp(-kSqrt5 * r);
}

double gp_log_marginal(const Mat& unit_inputs, const Vec& std_targets,
                       const KernelParams& k, double jitter_scale) {
    return log_marginal_impl(unit_inputs, std_targets, k, jitter_scale);
}

GpModel fit_gp(const Mat& unit_inputs, const Vec& rewards, std::uint64_t seed,
               double jitter_scale) {
    const Eigen::Index n = unit_inputs.rows();
    if (n < 2) throw std::invalid_argument("fit_gp: need at least 2 observations");
    if (unit_inputs.cols() != 4) throw std::invalid_argument("fit_gp: inputs must be n x 4");
    if (rewards.size() != n) throw std::invalid_argument("fit_gp: target count mismatch");
    if (unit_inputs.minCoeff() < -1e-9 || unit_inputs.maxCoeff() > 1.0 + 1e-9)
        throw std::invalid_argument("fit_gp: inputs must lie in the unit cube");

    GpModel model;
    model.train_inputs = unit_inputs;
    model.target_mean = rewards.mean();
    const double var = (rewards.array() - model.target_mean).square().mean();
    model.target_std = var > 1e-24 ? std::sqrt(var) : 1.0;
    model.train_targets = (rewards.array() - model.target_mean) / model.target_std;

    Rng rng(derive_seed(seed, 0x6770666974ULL));
    auto sample_log = [&](double lo, double hi) {
        return rng.uniform(std::log(lo), std::log(hi));
    };

    LogCoords best{};
    double best_lml = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 64; ++s) {
        LogCoords c{};
        for (int d = 0; d < 4; ++d) c.v[d] = sample_log(kLenLo, kLenHi);
        c.v[4] = sample_log(kSigLo, kSigHi);
        c.v[5] = sample_log(kNoiseLo, kNoiseHi);
        double lml;
        try {
            lml = log_marginal_impl(unit_inputs, model.train_targets, c.params(), jitter_scale);
        } catch (const SurrogateFailure&) {
            continue;
        }
        if (lml > best_lml) {
            best_lml = lml;
            best = c;
        }
    }
    if (!std::isfinite(best_lml))
        throw SurrogateFailure("fit_gp: no kernel hyperparameters factorized");

    const double lo[6] = {std::log(kLenLo), std::log(kLenLo), std::log(kLenLo),
                          std::log(kLenLo), std::log(kSigLo), std::log(kNoiseLo)};
    const double hi[6] = {std::log(kLenHi), std::log(kLenHi), std::log(kLenHi),
                          std::log(kLenHi), std::log(kSigHi), std::log(kNoiseHi)};
    for (int sweep = 0; sweep < 20; ++sweep)
        for (int coord = 0; coord < 6; ++coord)
            best_lml = golden_section(best, coord, lo[coord], hi[coord], unit_inputs,
                                      model.train_targets, jitter_scale, best_lml);

    model.kernel = best.params();
    model.factorization =
        factorize(kernel_matrix(unit_inputs, model.kernel), jitter_scale, model.jitter);
    model.alpha = model.factorization.solve(model.train_targets);
    return model;
}

CandidateStats predict(const GpModel& model, const Vec4& x) {
    const Eigen::Index n = model.train_inputs.rows();
    Vec k_star(n);
    for (Eigen::Index i = 0; i < n; ++i)
        k_star[i] = kernel_eval(model.train_inputs.row(i).transpose(), x, model.kernel);

    const double mu_std = k_star.dot(model.alpha);
    const Vec w = model.factorization.matrixL().solve(k_star);
    const double var_std = model.kernel.signal_variance - w.squaredNorm();

    CandidateStats out;
    out.mu = model.target_mean + model.target_std * mu_std;
    out.sigma2 = std::max(0.0, var_std) * model.target_std * model.target_std;
    return out;
}

}  // namespace earl
