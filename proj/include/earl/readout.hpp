#pragma once

#include <cstdint>
#include <vector>

#include "earl/types.hpp"

namespace earl {

// Single-layer GRU over reservoir state trajectories with an affine-softmax
// classifier on the final hidden state. Gate update keeps z on the old
// state: h_t = z ⊙ h_{t-1} + (1-z) ⊙ h̃_t.
struct GruParams {
    int input_dim = 0;
    int hidden_dim = 0;
    int classes = 0;
    Mat w_z, w_r, w_h;  // hidden x (input + hidden), acting on [x_t; h_{t-1}]
    Vec b_z, b_r, b_h;
    Mat w_out;          // classes x hidden
    Vec b_out;
};

struct TrainSpec {
    int epochs = 100;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double weight_decay = 1e-2;
    std::uint64_t seed = 0;
};

GruParams init_gru(int input_dim, int hidden_dim, int classes, std::uint64_t seed);

struct GruForward {
    Vec probs;   // classes, sums to 1
    Mat hidden;  // T x hidden
};

GruForward gru_forward(const GruParams& params, const Mat& states);
int gru_predict(const GruParams& params, const Mat& states);

struct GruTrainResult {
    GruParams params;
    std::vector<double> loss_curve;  // mean cross-entropy per epoch
};

GruTrainResult train_gru(const GruParams& init, const std::vector<Mat>& train_states,
                         const std::vector<int>& train_labels, const TrainSpec& spec);

// Max relative error between analytic BPTT gradients and central finite
// differences (h = 1e-5) over every parameter.
double gradient_check(const GruParams& params, const Mat& states, int label);

// One-vs-all linear classifier from ridge regression on final-step states.
// The intercept is left out of the penalty (fit on centered data), so in the
// strong-regularization limit scores collapse to the class frequencies.
struct RidgeReadout {
    Mat w;  // features x classes
    Vec b;  // classes
    Vec scores(const Vec& x) const { return w.transpose() * x + b; }
    int predict(const Vec& x) const {
        int best = 0;
        const Vec s = scores(x);
        for (int c = 1; c < s.size(); ++c)
            if (s[c] > s[best]) best = c;
        return best;
    }
};

// Plain (uncentered) normal-equations solve (XᵀX + λI) W = XᵀY.
Mat ridge_solve(const Mat& x, const Mat& y, double lambda);

RidgeReadout ridge_readout(const Mat& final_states, const std::vector<int>& labels,
                           double lambda);

}  // namespace earl
