#pragma once

#include <optional>
#include <vector>

#include "secpol/common/rng.hpp"
#include "secpol/env/actions.hpp"
#include "secpol/env/features.hpp"
#include "secpol/rl/adam.hpp"
#include "secpol/rl/mlp.hpp"

namespace secpol {

struct PpoConfig {
    std::vector<int> hidden{256, 128};
    double clip = 0.2;
    double lambda = 0.95;
    double gamma = 0.99;
    int horizon = 2048;
    int minibatch = 64;
    int epochs = 10;
    double lr = 1e-4;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
    /// Optional Gaussian noise added to logits while sampling (0 = off).
    double logit_noise = 0.0;

    void validate() const;  // throws std::invalid_argument
};

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

/// `values` holds V(s_0..s_T), the last entry being the bootstrap value.
/// Throws std::invalid_argument on length mismatch.
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<bool>& dones, double gamma, double lambda);

/// Per-sample clipped surrogate min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
double clipped_surrogate(double ratio, double advantage, double clip);

/// Collected experience for one update, segments already concatenated.
struct Rollout {
    std::vector<StateVector> states;
    std::vector<int> actions;
    std::vector<double> log_probs;  // behaviour log-probabilities
    std::vector<double> advantages;
    std::vector<double> returns;

    std::size_t size() const { return states.size(); }
    void append(const Rollout& o);
};

struct PpoStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
    /// Largest |ratio - 1| seen in the first minibatch pass of the first epoch.
    double first_pass_ratio_dev = 0.0;
    int minibatches = 0;
};

class PpoAgent {
public:
    PpoAgent() = default;
    PpoAgent(const PpoConfig& cfg, std::uint64_t seed);

    struct Step {
        ActionId action = 0;
        double log_prob = 0.0;
        double value = 0.0;
    };

    Eigen::VectorXd logits(const StateVector& s) const { return actor.forward(to_vec(s)); }
    Eigen::VectorXd probabilities(const StateVector& s) const { return softmax(logits(s)); }
    double value(const StateVector& s) const { return critic.forward(to_vec(s))[0]; }
    /// Samples from the policy with the caller's stream.
    Step act(const StateVector& s, Rng& rng) const;
    /// Mode of the policy (ties to the lowest index).
    ActionId greedy(const StateVector& s) const;

    /// Clipped-surrogate update over `epochs` shuffled passes. Throws
    /// std::invalid_argument when cached log-probabilities are missing.
    PpoStats update(Rollout rollout);

    PpoConfig cfg;
    Mlp actor;
    Mlp critic;
    Adam actor_opt;
    Adam critic_opt;
    Rng rng;
    long steps = 0;  // environment steps consumed
    long updates = 0;

private:
    static Eigen::VectorXd to_vec(const StateVector& s);
};

}  // namespace secpol
