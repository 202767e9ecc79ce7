#include "secpol/rl/dqn.hpp"

#include <stdexcept>

namespace secpol {

void DqnConfig::validate() const {
    if (!(0.0 <= eps_end && eps_end <= eps_start && eps_start <= 1.0)) {
        throw std::invalid_argument("dqn: need 0 <= eps_end <= eps_start <= 1");
    }
    if (target_sync < 1) throw std::invalid_argument("dqn: target_sync must be >= 1");
    if (decay_steps < 1) throw std::invalid_argument("dqn: decay_steps must be >= 1");
    if (batch < 1 || buffer < static_cast<std::size_t>(batch)) throw std::invalid_argument("dqn: bad batch/buffer sizes");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("dqn: gamma outside [0, 1]");
    if (!(lr > 0.0)) throw std::invalid_argument("dqn: lr must be positive");
    if (train_every < 1 || learning_starts < 0 || epsilon_reset_every < 0) {
        throw std::invalid_argument("dqn: bad training schedule");
    }
    for (int h : hidden) {
        if (h < 1) throw std::invalid_argument("dqn: hidden sizes must be positive");
    }
}

double epsilon_at(long step, const DqnConfig& cfg) {
    if (step >= cfg.decay_steps) return cfg.eps_end;
    if (step <= 0) return cfg.eps_start;
    const double frac = static_cast<double>(step) / static_cast<double>(cfg.decay_steps);
    return cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;
}

int argmax(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

Eigen::VectorXd to_eigen(const StateVector& s) { return Eigen::Map<const Eigen::VectorXd>(s.data(), kFeatureCount); }

namespace {

std::vector<int> layer_sizes(const std::vector<int>& hidden) {
    std::vector<int> sizes{kFeatureCount};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(kActionCount);
    return sizes;
}

}  // namespace

DqnAgent::DqnAgent(const DqnConfig& c, std::uint64_t seed) : cfg(c), buffer(c.buffer), rng(derive_seed(seed, 17)) {
    cfg.validate();
    Rng init(derive_seed(seed, 11));
    online = Mlp(layer_sizes(cfg.hidden), init);
    target = online;
    opt = Adam(online, cfg.lr);
}

double DqnAgent::epsilon() const {
    const long s = cfg.epsilon_reset_every > 0 ? steps % cfg.epsilon_reset_every : steps;
    return epsilon_at(s, cfg);
}

ActionId DqnAgent::select(const StateVector& s, double eps) {
    if (eps > 0.0 && rng.uniform() < eps) return static_cast<ActionId>(rng.uniform_int(0, kActionCount - 1));
    return greedy(s);
}

std::vector<double> td_targets(const std::vector<Experience>& batch, const Mlp& target, double gamma) {
    Eigen::MatrixXd next(kFeatureCount, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) next.col(static_cast<Eigen::Index>(i)) = to_eigen(batch[i].s_next);
    const Eigen::MatrixXd q = target.forward_batch(next);
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        y[i] = batch[i].done ? batch[i].r : batch[i].r + gamma * q.col(static_cast<Eigen::Index>(i)).maxCoeff();
    }
    return y;
}

double DqnAgent::train_step() {
    const auto idx = buffer.sample_indices(static_cast<std::size_t>(cfg.batch), rng);
    std::vector<Experience> batch;
    batch.reserve(idx.size());
    for (auto i : idx) batch.push_back(buffer.at(i));
    const auto y = td_targets(batch, target, cfg.gamma);

    Eigen::MatrixXd X(kFeatureCount, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) X.col(static_cast<Eigen::Index>(i)) = to_eigen(batch[i].s);
    Mlp::Cache cache;
    const Eigen::MatrixXd q = online.forward_cached(X, cache);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    double loss = 0.0;
    const double n = static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        const double err = q(batch[i].a, c) - y[i];
        loss += err * err / n;
        d(batch[i].a, c) = 2.0 * err / n;
    }
    if (!std::isfinite(loss)) throw NumericError("non-finite DQN loss");
    opt.step(online, online.backward(cache, d));
    ++updates;
    return loss;
}

std::optional<double> DqnAgent::observe(const Experience& e) {
    buffer.push(e);
    ++steps;
    std::optional<double> loss;
    if (steps >= cfg.learning_starts && steps % cfg.train_every == 0 &&
        buffer.size() >= static_cast<std::size_t>(cfg.batch)) {
        loss = train_step();
    }
    if (steps % cfg.target_sync == 0) sync_target();
    return loss;
}

}  // namespace secpol
