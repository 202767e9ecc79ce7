#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "secpol/common/rng.hpp"

namespace secpol {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MlpGrads {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;
};

/// Fully connected network, rectifier hidden layers, linear output.
///
/// The batched forward pass evaluates each column with the same routine as
/// the single-sample pass, so both give bit-identical results.
class Mlp {
public:
    Mlp() = default;
    /// All parameters zero.
    explicit Mlp(std::vector<int> sizes);
    /// He-uniform hidden weights, zero biases; the output layer is scaled by `out_scale`.
    Mlp(std::vector<int> sizes, Rng& rng, double out_scale = 1.0);

    struct Cache {
        std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[L] = output
    };

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    /// Columns are samples.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X) const;
    Eigen::MatrixXd forward_cached(const Eigen::MatrixXd& X, Cache& cache) const;
    /// Gradient of a loss given dLoss/dOutput (out x batch) for the cached batch.
    MlpGrads backward(const Cache& cache, const Eigen::MatrixXd& d_out) const;

    MlpGrads zero_grads() const;
    std::size_t layer_count() const { return W.size(); }
    const std::vector<int>& sizes() const { return sizes_; }
    int input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
    int output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
    std::size_t parameter_count() const;
    bool finite() const;

    bool operator==(const Mlp& o) const;

    std::vector<Eigen::MatrixXd> W;  // W[l] is sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> b;

private:
    std::vector<int> sizes_;
};

/// Max-subtracted normalized exponentials.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

}  // namespace secpol
