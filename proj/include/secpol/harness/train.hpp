#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "secpol/env/env.hpp"
#include "secpol/harness/curriculum.hpp"
#include "secpol/rl/checkpoint.hpp"
#include "secpol/rl/dqn.hpp"
#include "secpol/rl/ppo.hpp"

namespace secpol {

struct TrainOptions {
    AgentKind kind = AgentKind::Ppo;
    EnvConfig env;
    DqnConfig dqn;
    PpoConfig ppo;
    Curriculum curriculum = Curriculum::defaults();
    std::uint64_t seed = 1;
    long steps = 200000;
    int workers = 1;
    /// Phase-boundary and final checkpoints go here when non-empty.
    std::filesystem::path checkpoint_dir;
    std::function<void(const std::string&)> progress;
};

struct CurvePoint {
    long episode = 0;
    double episode_return = 0.0;
    std::string phase;
    bool operator==(const CurvePoint&) const = default;
};

struct TrainResult {
    std::vector<CurvePoint> curve;
    std::shared_ptr<DqnAgent> dqn;
    std::shared_ptr<PpoAgent> ppo;
    long env_steps = 0;
    long updates = 0;
    std::vector<std::string> warnings;
    std::vector<std::filesystem::path> checkpoints;
};

/// Runs the curriculum phases in order. Rollouts from several workers are
/// concatenated in worker order; results depend only on the seed and the
/// worker count.
TrainResult train(const TrainOptions& options);

/// CSV with header `episode,return,phase`.
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

}  // namespace secpol
