#pragma once

#include <vector>

#include "secpol/common/rng.hpp"
#include "secpol/env/actions.hpp"
#include "secpol/env/features.hpp"
#include "secpol/rl/adam.hpp"
#include "secpol/rl/mlp.hpp"
#include "secpol/rl/replay.hpp"

namespace secpol {

struct DqnConfig {
    std::vector<int> hidden{256, 128};
    double lr = 5e-4;
    int batch = 64;
    double eps_start = 1.0;
    double eps_end = 0.01;
    long decay_steps = 10000;
    long target_sync = 1000;
    double gamma = 0.99;
    std::size_t buffer = 50000;
    int train_every = 4;
    long learning_starts = 1000;
    /// Optional exploration restart: epsilon schedule restarts every N steps (0 = off).
    long epsilon_reset_every = 0;

    void validate() const;  // throws std::invalid_argument
};

/// Linear decay from eps_start to eps_end over decay_steps, then constant.
double epsilon_at(long step, const DqnConfig& cfg);

/// Index of the largest entry; ties go to the lowest index.
int argmax(const Eigen::VectorXd& v);

Eigen::VectorXd to_eigen(const StateVector& s);

class DqnAgent {
public:
    DqnAgent() = default;
    DqnAgent(const DqnConfig& cfg, std::uint64_t seed);

    Eigen::VectorXd q_values(const StateVector& s) const { return online.forward(to_eigen(s)); }
    ActionId greedy(const StateVector& s) const { return argmax(q_values(s)); }
    /// Epsilon-greedy using the agent's own stream.
    ActionId select(const StateVector& s, double eps);
    ActionId select(const StateVector& s) { return select(s, epsilon()); }
    double epsilon() const;

    /// Stores the transition, trains on schedule and syncs the target network.
    /// Returns the loss when a training step ran.
    std::optional<double> observe(const Experience& e);

    /// One gradient step on a sampled batch. Throws std::logic_error when the buffer is underfull.
    double train_step();
    void sync_target() { target = online; }

    DqnConfig cfg;
    Mlp online;
    Mlp target;
    Adam opt;
    ReplayBuffer buffer{1};
    Rng rng;
    long steps = 0;
    long updates = 0;
};

/// TD targets y = r + gamma * max_a' Q_target(s', a') (y = r when done).
std::vector<double> td_targets(const std::vector<Experience>& batch, const Mlp& target, double gamma);

}  // namespace secpol
