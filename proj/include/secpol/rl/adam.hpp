#pragma once

#include <vector>

#include <Eigen/Dense>

#include "secpol/rl/mlp.hpp"

namespace secpol {

/// Bias-corrected Adam over the parameters of one Mlp.
class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    /// Throws ShapeError on mismatch and NumericError on non-finite gradients.
    void step(Mlp& net, const MlpGrads& g);

    long t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<Eigen::MatrixXd> mW, vW;
    std::vector<Eigen::VectorXd> mb, vb;

    bool operator==(const Adam& o) const;
};

}  // namespace secpol
