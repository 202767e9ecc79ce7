#include "secpol/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "secpol/rl/dqn.hpp"

namespace secpol {

void PpoConfig::validate() const {
    if (!(clip > 0.0 && clip < 1.0)) throw std::invalid_argument("ppo: clip must be in (0, 1)");
    if (!(lambda >= 0.0 && lambda <= 1.0) || !(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("ppo: gamma and lambda must be in [0, 1]");
    }
    if (horizon < 1 || minibatch < 1 || horizon % minibatch != 0) {
        throw std::invalid_argument("ppo: horizon must be a positive multiple of minibatch");
    }
    if (epochs < 1) throw std::invalid_argument("ppo: epochs must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("ppo: lr must be positive");
    if (value_coef < 0.0 || entropy_coef < 0.0 || logit_noise < 0.0) {
        throw std::invalid_argument("ppo: coefficients must be non-negative");
    }
    for (int h : hidden) {
        if (h < 1) throw std::invalid_argument("ppo: hidden sizes must be positive");
    }
}

GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<bool>& dones, double gamma, double lambda) {
    const std::size_t n = rewards.size();
    if (dones.size() != n || values.size() != n + 1) {
        throw std::invalid_argument("gae: need |dones| = |rewards| and |values| = |rewards| + 1");
    }
    GaeResult g;
    g.advantages.assign(n, 0.0);
    g.returns.assign(n, 0.0);
    double next = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        const double live = dones[k] ? 0.0 : 1.0;
        const double delta = rewards[k] + gamma * values[k + 1] * live - values[k];
        next = delta + gamma * lambda * live * next;
        g.advantages[k] = next;
        g.returns[k] = next + values[k];
    }
    return g;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
    return std::min(ratio * advantage, std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage);
}

void Rollout::append(const Rollout& o) {
    states.insert(states.end(), o.states.begin(), o.states.end());
    actions.insert(actions.end(), o.actions.begin(), o.actions.end());
    log_probs.insert(log_probs.end(), o.log_probs.begin(), o.log_probs.end());
    advantages.insert(advantages.end(), o.advantages.begin(), o.advantages.end());
    returns.insert(returns.end(), o.returns.begin(), o.returns.end());
}

namespace {

std::vector<int> sizes_with(const std::vector<int>& hidden, int out) {
    std::vector<int> s{kFeatureCount};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
}

}  // namespace

Eigen::VectorXd PpoAgent::to_vec(const StateVector& s) { return to_eigen(s); }

PpoAgent::PpoAgent(const PpoConfig& c, std::uint64_t seed) : cfg(c), rng(derive_seed(seed, 23)) {
    cfg.validate();
    Rng init(derive_seed(seed, 21));
    actor = Mlp(sizes_with(cfg.hidden, kActionCount), init, 0.01);
    critic = Mlp(sizes_with(cfg.hidden, 1), init, 1.0);
    actor_opt = Adam(actor, cfg.lr);
    critic_opt = Adam(critic, cfg.lr);
}

PpoAgent::Step PpoAgent::act(const StateVector& s, Rng& r) const {
    const auto x = to_vec(s);
    Eigen::VectorXd z = actor.forward(x);
    const Eigen::VectorXd logp = log_softmax(z);
    Eigen::VectorXd sample_logp = logp;
    if (cfg.logit_noise > 0.0) {
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] += cfg.logit_noise * r.normal();
        sample_logp = log_softmax(z);
    }
    const double u = r.uniform();
    double acc = 0.0;
    int a = kActionCount - 1;
    for (int i = 0; i < kActionCount; ++i) {
        acc += std::exp(sample_logp[i]);
        if (u < acc) {
            a = i;
            break;
        }
    }
    return {a, logp[a], critic.forward(x)[0]};
}

ActionId PpoAgent::greedy(const StateVector& s) const { return argmax(logits(s)); }

PpoStats PpoAgent::update(Rollout ro) {
    const std::size_t n = ro.size();
    if (n == 0) throw std::invalid_argument("ppo: empty rollout");
    if (ro.log_probs.size() != n) throw std::invalid_argument("ppo: rollout is missing cached log-probabilities");
    if (ro.actions.size() != n || ro.advantages.size() != n || ro.returns.size() != n) {
        throw std::invalid_argument("ppo: rollout fields have different lengths");
    }

    // Normalize advantages over the whole rollout.
    const double mean = std::accumulate(ro.advantages.begin(), ro.advantages.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double a : ro.advantages) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (double& a : ro.advantages) a = (a - mean) / (sd + 1e-8);

    PpoStats st;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto mb = static_cast<std::size_t>(cfg.minibatch);
    double kl_sum = 0.0, clip_sum = 0.0;
    std::size_t samples = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += mb) {
            const std::size_t end = std::min(n, start + mb);
            const auto B = static_cast<Eigen::Index>(end - start);
            Eigen::MatrixXd X(kFeatureCount, B);
            for (Eigen::Index j = 0; j < B; ++j) X.col(j) = to_vec(ro.states[order[start + static_cast<std::size_t>(j)]]);

            Mlp::Cache ac, cc;
            const Eigen::MatrixXd Z = actor.forward_cached(X, ac);
            const Eigen::MatrixXd V = critic.forward_cached(X, cc);
            Eigen::MatrixXd dZ(Z.rows(), B);
            Eigen::MatrixXd dV(1, B);
            const double inv = 1.0 / static_cast<double>(B);
            double pl = 0.0, vl = 0.0, ent = 0.0;

            for (Eigen::Index j = 0; j < B; ++j) {
                const std::size_t i = order[start + static_cast<std::size_t>(j)];
                const int a = ro.actions[i];
                const Eigen::VectorXd logp = log_softmax(Z.col(j));
                const Eigen::VectorXd p = logp.array().exp();
                const double ratio = std::exp(logp[a] - ro.log_probs[i]);
                const double A = ro.advantages[i];
                if (epoch == 0 && start == 0) st.first_pass_ratio_dev = std::max(st.first_pass_ratio_dev, std::abs(ratio - 1.0));
                const double unclipped = ratio * A;
                const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * A;
                pl -= std::min(unclipped, clipped) * inv;
                const double g_ratio = unclipped <= clipped ? A : 0.0;
                if (ratio < 1.0 - cfg.clip || ratio > 1.0 + cfg.clip) clip_sum += 1.0;
                kl_sum += ro.log_probs[i] - logp[a];
                ++samples;

                double H = 0.0;
                for (Eigen::Index k = 0; k < p.size(); ++k) H -= p[k] * logp[k];
                ent += H * inv;

                // d(-surrogate)/dz = -(g * ratio) (onehot - p); d(-c H)/dz = c p (logp + H).
                const double coef = -g_ratio * ratio * inv;
                for (Eigen::Index k = 0; k < p.size(); ++k) {
                    const double onehot = k == a ? 1.0 : 0.0;
                    dZ(k, j) = coef * (onehot - p[k]) + cfg.entropy_coef * inv * p[k] * (logp[k] + H);
                }
                const double err = V(0, j) - ro.returns[i];
                vl += cfg.value_coef * err * err * inv;
                dV(0, j) = cfg.value_coef * 2.0 * err * inv;
            }
            if (!std::isfinite(pl) || !std::isfinite(vl)) throw NumericError("non-finite PPO loss");
            actor_opt.step(actor, actor.backward(ac, dZ));
            critic_opt.step(critic, critic.backward(cc, dV));
            st.policy_loss += pl;
            st.value_loss += vl;
            st.entropy += ent;
            ++st.minibatches;
        }
    }
    if (st.minibatches > 0) {
        st.policy_loss /= st.minibatches;
        st.value_loss /= st.minibatches;
        st.entropy /= st.minibatches;
    }
    if (samples > 0) {
        st.approx_kl = kl_sum / static_cast<double>(samples);
        st.clip_fraction = clip_sum / static_cast<double>(samples);
    }
    ++updates;
    return st;
}

}  // namespace secpol
