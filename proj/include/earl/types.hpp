#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <stdexcept>
#include <string>

namespace earl {

using Scalar = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec4 = Eigen::Vector4d;
using SpMat = Eigen::SparseMatrix<double>;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;
using MatRef = Eigen::Ref<const Eigen::MatrixXd>;

// Thrown when a run/tool configuration is inconsistent or out of range.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when sampled reservoir weights are unusable (e.g. no nonzeros).
struct DegenerateReservoirError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when readout training produces non-finite loss.
struct TrainingFailure : std::runtime_error {
    TrainingFailure(const std::string& msg, int epoch_index)
        : std::runtime_error(msg), epoch(epoch_index) {}
    int epoch;
};

// Thrown when the GP kernel matrix cannot be factorized even with jitter.
struct SurrogateFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on numeric breakdown (overflow, singular solve, non-finite state).
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an ingested file does not match the expected schema.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace earl
