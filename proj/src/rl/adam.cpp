#include "secpol/rl/adam.hpp"

#include <cmath>

namespace secpol {

Adam::Adam(const Mlp& net, double lr_, double beta1_, double beta2_, double eps_)
    : lr(lr_), beta1(beta1_), beta2(beta2_), eps(eps_) {
    const auto z = net.zero_grads();
    mW = vW = z.dW;
    mb = vb = z.db;
}

void Adam::step(Mlp& net, const MlpGrads& g) {
    if (g.dW.size() != net.W.size() || mW.size() != net.W.size()) throw ShapeError("optimizer/network layer mismatch");
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        if (g.dW[l].rows() != net.W[l].rows() || g.dW[l].cols() != net.W[l].cols() || g.db[l].size() != net.b[l].size()) {
            throw ShapeError("gradient shape mismatch");
        }
        if (!g.dW[l].allFinite() || !g.db[l].allFinite()) throw NumericError("non-finite gradient");
    }
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    const auto update = [&](auto& p, const auto& grad, auto& m, auto& v) {
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        update(net.W[l], g.dW[l], mW[l], vW[l]);
        update(net.b[l], g.db[l], mb[l], vb[l]);
    }
}

bool Adam::operator==(const Adam& o) const {
    if (t != o.t || lr != o.lr || beta1 != o.beta1 || beta2 != o.beta2 || eps != o.eps) return false;
    if (mW.size() != o.mW.size()) return false;
    for (std::size_t l = 0; l < mW.size(); ++l) {
        if (mW[l] != o.mW[l] || vW[l] != o.vW[l] || mb[l] != o.mb[l] || vb[l] != o.vb[l]) return false;
    }
    return true;
}

}  // namespace secpol
