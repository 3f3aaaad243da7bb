#include "earl/readout.hpp"

#include <algorithm>
#include <cmath>

#include "earl/adamw.hpp"
#include "earl/rng.hpp"

namespace earl {
namespace {

Vec sigmoid(const Vec& a) { return (1.0 / (1.0 + (-a.array()).exp())).matrix(); }

struct ForwardCache {
    std::vector<Vec> z, r, c, h, g;  // per step; g = r ⊙ h_prev
    Vec logits, probs;
    double loss = 0.0;
};

Vec concat(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

ForwardCache run_forward(const GruParams& p, const Mat& states, int label) {
    const int T = static_cast<int>(states.rows());
    ForwardCache fc;
    fc.z.reserve(T);
    fc.r.reserve(T);
    fc.c.reserve(T);
    fc.h.reserve(T);
    fc.g.reserve(T);
    Vec h = Vec::Zero(p.hidden_dim);
    for (int t = 0; t < T; ++t) {
        const Vec x = states.row(t).transpose();
        const Vec xh = concat(x, h);
        const Vec z = sigmoid(p.w_z * xh + p.b_z);
        const Vec r = sigmoid(p.w_r * xh + p.b_r);
        const Vec g = r.cwiseProduct(h);
        const Vec c = (p.w_h * concat(x, g) + p.b_h).array().tanh().matrix();
        h = z.cwiseProduct(h) + (Vec::Ones(p.hidden_dim) - z).cwiseProduct(c);
        fc.z.push_back(z);
        fc.r.push_back(r);
        fc.g.push_back(g);
        fc.c.push_back(c);
        fc.h.push_back(h);
    }
    fc.logits = p.w_out * h + p.b_out;
    const double mx = fc.logits.maxCoeff();
    const Vec shifted = (fc.logits.array() - mx).exp().matrix();
    const double denom = shifted.sum();
    fc.probs = shifted / denom;
    if (label >= 0) fc.loss = std::log(denom) + mx - fc.logits[label];
    return fc;
}

struct GruGrads {
    Mat w_z, w_r, w_h, w_out;
    Vec b_z, b_r, b_h, b_out;

    explicit GruGrads(const GruParams& p)
        : w_z(Mat::Zero(p.w_z.rows(), p.w_z.cols())),
          w_r(Mat::Zero(p.w_r.rows(), p.w_r.cols())),
          w_h(Mat::Zero(p.w_h.rows(), p.w_h.cols())),
          w_out(Mat::Zero(p.w_out.rows(), p.w_out.cols())),
          b_z(Vec::Zero(p.b_z.size())),
          b_r(Vec::Zero(p.b_r.size())),
          b_h(Vec::Zero(p.b_h.size())),
          b_out(Vec::Zero(p.b_out.size())) {}
};

// Accumulates weight * dL/dθ for one sequence into g and returns the loss.
double loss_and_grad(const GruParams& p, const Mat& states, int label, GruGrads& g,
                     double weight) {
    const int T = static_cast<int>(states.rows());
    const int H = p.hidden_dim;
    const ForwardCache fc = run_forward(p, states, label);

    Vec dlogits = fc.probs;
    dlogits[label] -= 1.0;
    dlogits *= weight;
    g.w_out += dlogits * fc.h[T - 1].transpose();
    g.b_out += dlogits;

    Vec dh = p.w_out.transpose() * dlogits;
    for (int t = T - 1; t >= 0; --t) {
        const Vec x = states.row(t).transpose();
        const Vec h_prev = t > 0 ? fc.h[t - 1] : Vec::Zero(H).eval();
        const Vec& z = fc.z[t];
        const Vec& r = fc.r[t];
        const Vec& c = fc.c[t];

        const Vec dz = dh.cwiseProduct(h_prev - c);
        const Vec dc = dh.cwiseProduct(Vec::Ones(H) - z);
        const Vec da_h = dc.cwiseProduct((1.0 - c.array().square()).matrix());
        g.w_h += da_h * concat(x, fc.g[t]).transpose();
        g.b_h += da_h;
        const Vec dg = (p.w_h.transpose() * da_h).tail(H);

        const Vec dr = dg.cwiseProduct(h_prev);
        const Vec da_z = dz.cwiseProduct(z).cwiseProduct(Vec::Ones(H) - z);
        const Vec da_r = dr.cwiseProduct(r).cwiseProduct(Vec::Ones(H) - r);
        const Vec xh = concat(x, h_prev);
        g.w_z += da_z * xh.transpose();
        g.b_z += da_z;
        g.w_r += da_r * xh.transpose();
        g.b_r += da_r;

        dh = dh.cwiseProduct(z) + dg.cwiseProduct(r) +
             (p.w_z.transpose() * da_z).tail(H) + (p.w_r.transpose() * da_r).tail(H);
    }
    return fc.loss;
}

}  // namespace

GruParams init_gru(int input_dim, int hidden_dim, int classes, std::uint64_t seed) {
    if (input_dim < 1 || hidden_dim < 1 || classes < 2)
        throw std::invalid_argument("init_gru: bad dimensions");
    GruParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.classes = classes;
    Rng rng(derive_seed(seed, 0x677275ULL));
    auto fill = [&](Mat& m, int rows, int cols, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        m.resize(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-bound, bound);
    };
    const int joint = input_dim + hidden_dim;
    fill(p.w_z, hidden_dim, joint, joint);
    fill(p.w_r, hidden_dim, joint, joint);
    fill(p.w_h, hidden_dim, joint, joint);
    fill(p.w_out, classes, hidden_dim, hidden_dim);
    p.b_z = Vec::Zero(hidden_dim);
    p.b_r = Vec::Zero(hidden_dim);
    p.b_h = Vec::Zero(hidden_dim);
    p.b_out = Vec::Zero(classes);
    return p;
}

GruForward gru_forward(const GruParams& params, const Mat& states) {
    if (states.rows() < 1) throw std::invalid_argument("gru_forward: empty sequence");
    if (states.cols() != params.input_dim)
        throw std::invalid_argument("gru_forward: input dimension mismatch");
    ForwardCache fc = run_forward(params, states, -1);
    GruForward out;
    out.probs = fc.probs;
    out.hidden.resize(states.rows(), params.hidden_dim);
    for (int t = 0; t < states.rows(); ++t) out.hidden.row(t) = fc.h[t].transpose();
    return out;
}

int gru_predict(const GruParams& params, const Mat& states) {
    const Vec probs = gru_forward(params, states).probs;
    int best = 0;
    for (int c = 1; c < probs.size(); ++c)
        if (probs[c] > probs[best]) best = c;
    return best;
}

GruTrainResult train_gru(const GruParams& init, const std::vector<Mat>& train_states,
                         const std::vector<int>& train_labels, const TrainSpec& spec) {
    if (train_states.size() != train_labels.size() || train_states.empty())
        throw std::invalid_argument("train_gru: states/labels size mismatch");
    if (spec.epochs < 1 || spec.batch_size < 1)
        throw std::invalid_argument("train_gru: epochs and batch_size must be >= 1");
    std::vector<int> per_class(init.classes, 0);
    for (int y : train_labels) {
        if (y < 0 || y >= init.classes)
            throw std::invalid_argument("train_gru: label out of range");
        ++per_class[y];
    }
    for (int c = 0; c < init.classes; ++c)
        if (per_class[c] == 0)
            throw std::invalid_argument("train_gru: class " + std::to_string(c) +
                                        " has no samples");

    GruTrainResult result;
    result.params = init;
    GruParams& p = result.params;
    AdamW opt({spec.learning_rate, 0.9, 0.999, 1e-8, spec.weight_decay});
    Rng shuffle_rng(derive_seed(spec.seed, 0x73687566ULL));

    const int n = static_cast<int>(train_states.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.uniform_int(static_cast<std::uint64_t>(i + 1))]);

        double epoch_loss = 0.0;
        for (int start = 0; start < n; start += spec.batch_size) {
            const int end = std::min(n, start + spec.batch_size);
            const double w = 1.0 / (end - start);
            GruGrads g(p);
            double batch_loss = 0.0;
            for (int i = start; i < end; ++i)
                batch_loss += w * loss_and_grad(p, train_states[order[i]],
                                                train_labels[order[i]], g, w);
            if (!std::isfinite(batch_loss))
                throw TrainingFailure("train_gru: loss diverged", epoch);
            epoch_loss += batch_loss * (end - start);

            opt.begin_step();
            opt.update(p.w_z, g.w_z, 0);
            opt.update(p.b_z, g.b_z, 1);
            opt.update(p.w_r, g.w_r, 2);
            opt.update(p.b_r, g.b_r, 3);
            opt.update(p.w_h, g.w_h, 4);
            opt.update(p.b_h, g.b_h, 5);
            opt.update(p.w_out, g.w_out, 6);
            opt.update(p.b_out, g.b_out, 7);
        }
        result.loss_curve.push_back(epoch_loss / n);
    }
    return result;
}

double gradient_check(const GruParams& params, const Mat& states, int label) {
    GruParams p = params;
    GruGrads g(p);
    loss_and_grad(p, states, label, g, 1.0);

    const double h = 1e-5;
    double worst = 0.0;
    // Roundoff on near-zero gradients should not masquerade as relative
    // error, hence the floor in the denominator.
    auto rel = [&](double analytic, double numeric) {
        return std::abs(analytic - numeric) /
               std::max(std::abs(analytic) + std::abs(numeric), 1e-3);
    };
    auto probe = [&](double& theta, double analytic) {
        const double saved = theta;
        theta = saved + h;
        const double up = run_forward(p, states, label).loss;
        theta = saved - h;
        const double down = run_forward(p, states, label).loss;
        theta = saved;
        worst = std::max(worst, rel(analytic, (up - down) / (2.0 * h)));
    };

    Mat* mats[] = {&p.w_z, &p.w_r, &p.w_h, &p.w_out};
    const Mat* mgrads[] = {&g.w_z, &g.w_r, &g.w_h, &g.w_out};
    for (int k = 0; k < 4; ++k)
        for (int c = 0; c < mats[k]->cols(); ++c)
            for (int r = 0; r < mats[k]->rows(); ++r)
                probe((*mats[k])(r, c), (*mgrads[k])(r, c));

    Vec* vecs[] = {&p.b_z, &p.b_r, &p.b_h, &p.b_out};
    const Vec* vgrads[] = {&g.b_z, &g.b_r, &g.b_h, &g.b_out};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < vecs[k]->size(); ++i) probe((*vecs[k])[i], (*vgrads[k])[i]);

    return worst;
}

Mat ridge_solve(const Mat& x, const Mat& y, double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("ridge_solve: lambda must be positive");
    if (x.rows() != y.rows()) throw std::invalid_argument("ridge_solve: row count mismatch");
    const Mat gram = x.transpose() * x + lambda * Mat::Identity(x.cols(), x.cols());
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericFailure("ridge_solve: normal equations not positive definite");
    return llt.solve(x.transpose() * y);
}

RidgeReadout ridge_readout(const Mat& final_states, const std::vector<int>& labels,
                           double lambda) {
    if (static_cast<std::size_t>(final_states.rows()) != labels.size() || labels.empty())
        throw std::invalid_argument("ridge_readout: states/labels size mismatch");
    int classes = 0;
    for (int y : labels) {
        if (y < 0) throw std::invalid_argument("ridge_readout: negative label");
        classes = std::max(classes, y + 1);
    }

    Mat targets = Mat::Zero(final_states.rows(), classes);
    for (Eigen::Index i = 0; i < final_states.rows(); ++i) targets(i, labels[i]) = 1.0;

    const Vec x_mean = final_states.colwise().mean().transpose();
    const Vec y_mean = targets.colwise().mean().transpose();
    const Mat xc = final_states.rowwise() - x_mean.transpose();
    const Mat yc = targets.rowwise() - y_mean.transpose();

    RidgeReadout out;
    out.w = ridge_solve(xc, yc, lambda);
    out.b = y_mean - out.w.transpose() * x_mean;
    return out;
}

}  // namespace earl
