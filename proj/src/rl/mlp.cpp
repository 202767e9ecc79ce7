#include "secpol/rl/mlp.hpp"

#include <cmath>
#include <string>

namespace secpol {

namespace {

[[gnu::noinline]] Eigen::VectorXd affine(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                                         const Eigen::VectorXd& x) {
    Eigen::VectorXd z = b;
    z.noalias() += W * x;
    return z;
}

void check_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw ShapeError("an MLP needs at least input and output sizes");
    for (int s : sizes) {
        if (s < 1) throw ShapeError("layer sizes must be positive");
    }
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    check_sizes(sizes_);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        W.push_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
        b.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
    }
}

Mlp::Mlp(std::vector<int> sizes, Rng& rng, double out_scale) : Mlp(std::move(sizes)) {
    for (std::size_t l = 0; l < W.size(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(W[l].cols()));
        const double scale = l + 1 == W.size() ? out_scale : 1.0;
        // Column-major fill keeps the draw order independent of Eigen internals.
        for (Eigen::Index c = 0; c < W[l].cols(); ++c) {
            for (Eigen::Index r = 0; r < W[l].rows(); ++r) W[l](r, c) = scale * rng.uniform(-bound, bound);
        }
    }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
    if (x.size() != input_size()) {
        throw ShapeError("input has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(input_size()));
    }
    Eigen::VectorXd a = x;
    for (std::size_t l = 0; l < W.size(); ++l) {
        a = affine(W[l], b[l], a);
        if (l + 1 < W.size()) a = a.cwiseMax(0.0);
    }
    return a;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& X) const {
    Cache unused;
    return forward_cached(X, unused);
}

Eigen::MatrixXd Mlp::forward_cached(const Eigen::MatrixXd& X, Cache& cache) const {
    if (X.rows() != input_size()) {
        throw ShapeError("input has " + std::to_string(X.rows()) + " rows, expected " + std::to_string(input_size()));
    }
    const auto n = X.cols();
    cache.act.assign(W.size() + 1, {});
    cache.act[0] = X;
    for (std::size_t l = 0; l < W.size(); ++l) cache.act[l + 1].resize(W[l].rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd a = X.col(j);
        for (std::size_t l = 0; l < W.size(); ++l) {
            a = affine(W[l], b[l], a);
            if (l + 1 < W.size()) a = a.cwiseMax(0.0);
            cache.act[l + 1].col(j) = a;
        }
    }
    return cache.act.back();
}

MlpGrads Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_out) const {
    if (cache.act.size() != W.size() + 1) throw ShapeError("cache does not match the network");
    if (d_out.rows() != output_size() || d_out.cols() != cache.act[0].cols()) {
        throw ShapeError("output gradient shape mismatch");
    }
    if (!d_out.allFinite()) throw NumericError("non-finite loss gradient");
    MlpGrads g;
    g.dW.resize(W.size());
    g.db.resize(W.size());
    Eigen::MatrixXd delta = d_out;
    for (std::size_t l = W.size(); l-- > 0;) {
        g.dW[l].noalias() = delta * cache.act[l].transpose();
        g.db[l] = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd prev = W[l].transpose() * delta;
        // Rectifier derivative from the stored activation.
        delta = (cache.act[l].array() > 0.0).select(prev, 0.0);
    }
    return g;
}

MlpGrads Mlp::zero_grads() const {
    MlpGrads g;
    for (std::size_t l = 0; l < W.size(); ++l) {
        g.dW.push_back(Eigen::MatrixXd::Zero(W[l].rows(), W[l].cols()));
        g.db.push_back(Eigen::VectorXd::Zero(b[l].size()));
    }
    return g;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < W.size(); ++l) n += static_cast<std::size_t>(W[l].size() + b[l].size());
    return n;
}

bool Mlp::finite() const {
    for (std::size_t l = 0; l < W.size(); ++l) {
        if (!W[l].allFinite() || !b[l].allFinite()) return false;
    }
    return true;
}

bool Mlp::operator==(const Mlp& o) const {
    if (sizes_ != o.sizes_) return false;
    for (std::size_t l = 0; l < W.size(); ++l) {
        if (W[l] != o.W[l] || b[l] != o.b[l]) return false;
    }
    return true;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    return logits.array() - lse;
}

}  // namespace secpol
