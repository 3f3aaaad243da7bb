#pragma once

#include <cmath>
#include <vector>

#include "earl/types.hpp"

namespace earl {

// Adam with decoupled weight decay. The decay multiplies the parameter
// directly (not through the learning rate), so lr = 0 still shrinks
// weights when weight_decay > 0.
class AdamW {
public:
    struct Hyper {
        double lr = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
        double weight_decay = 1e-2;
    };

    AdamW() : h_() {}
    explicit AdamW(const Hyper& h) : h_(h) {}

    const Hyper& hyper() const { return h_; }

    // Call once per optimizer step, before the per-tensor updates.
    void begin_step() { ++t_; }

    // slot identifies the tensor so first/second moments persist across
    // steps; slots must be used consistently.
    void update(Eigen::Ref<Mat> param, const Mat& grad, std::size_t slot) {
        if (slot >= m_.size()) {
            m_.resize(slot + 1);
            v_.resize(slot + 1);
        }
        if (m_[slot].size() == 0) {
            m_[slot] = Mat::Zero(param.rows(), param.cols());
            v_[slot] = Mat::Zero(param.rows(), param.cols());
        }
        Mat& m = m_[slot];
        Mat& v = v_[slot];
        m = h_.beta1 * m + (1.0 - h_.beta1) * grad;
        v = h_.beta2 * v + (1.0 - h_.beta2) * grad.array().square().matrix();
        const double bc1 = 1.0 - std::pow(h_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(h_.beta2, static_cast<double>(t_));
        param = (1.0 - h_.weight_decay) * param -
                (h_.lr / bc1) *
                    (m.array() / ((v.array() / bc2).sqrt() + h_.eps)).matrix();
    }

    void update(Eigen::Ref<Vec> param, const Vec& grad, std::size_t slot) {
        Mat p = param;
        update(Eigen::Ref<Mat>(p), Mat(grad), slot);
        param = p.col(0);
    }

private:
    Hyper h_;
    long t_ = 0;
    std::vector<Mat> m_, v_;
};

}  // namespace earl
