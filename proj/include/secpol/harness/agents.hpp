#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "secpol/common/rng.hpp"
#include "secpol/env/actions.hpp"
#include "secpol/env/features.hpp"
#include "secpol/rl/dqn.hpp"
#include "secpol/rl/ppo.hpp"

namespace secpol {

/// Either an index into the slot tables or a concrete action (scripted agents).
using AgentChoice = std::variant<ActionId, ConcreteAction>;

class Agent {
public:
    virtual ~Agent() = default;
    virtual std::string name() const = 0;
    /// Resets per-episode state; `seed` drives any internal randomness.
    virtual void begin_episode(std::uint64_t seed) { (void)seed; }
    /// `step` is the world step the observation was taken at.
    virtual AgentChoice act(const StateVector& state, const SlotTables& tables, int step) = 0;
};

/// Keeps the baseline configuration: always NoOp.
class StaticPolicy : public Agent {
public:
    std::string name() const override { return "Static Policies"; }
    AgentChoice act(const StateVector&, const SlotTables&, int) override { return ActionId{0}; }
};

/// Detector with a human in the loop. When the window's max anomaly reaches
/// the threshold, the top-scoring candidate among block, restrict, isolate
/// and monitor targets is flagged; its mitigating action takes effect a
/// uniformly drawn number of steps later. Each candidate is handled once.
class MlHumanDelay : public Agent {
public:
    struct Params {
        double threshold = 0.7;
        int delay_min = 60;
        int delay_max = 180;
    };
    MlHumanDelay() : MlHumanDelay(Params{}) {}
    explicit MlHumanDelay(Params p);

    std::string name() const override { return "ML + Human Oversight"; }
    void begin_episode(std::uint64_t seed) override;
    AgentChoice act(const StateVector& state, const SlotTables& tables, int step) override;

    /// Delay drawn for each flag, in order (for inspection).
    const std::vector<int>& delays() const { return delays_; }

private:
    struct Pending {
        int due;  // observation step at which the action is issued
        ConcreteAction action;
    };
    Params p_;
    Rng rng_;
    std::set<std::string> handled_;
    std::vector<Pending> queue_;
    std::vector<int> delays_;
};

class DqnPolicy : public Agent {
public:
    explicit DqnPolicy(std::shared_ptr<const DqnAgent> agent) : agent_(std::move(agent)) {}
    std::string name() const override { return "RL Agent (DQN)"; }
    AgentChoice act(const StateVector& s, const SlotTables&, int) override { return agent_->greedy(s); }

private:
    std::shared_ptr<const DqnAgent> agent_;
};

class PpoPolicy : public Agent {
public:
    explicit PpoPolicy(std::shared_ptr<const PpoAgent> agent) : agent_(std::move(agent)) {}
    std::string name() const override { return "RL Agent (PPO)"; }
    AgentChoice act(const StateVector& s, const SlotTables&, int) override { return agent_->greedy(s); }

private:
    std::shared_ptr<const PpoAgent> agent_;
};

/// Wraps a callable; handy for scripted test agents.
class ScriptedAgent : public Agent {
public:
    using Fn = std::function<AgentChoice(const StateVector&, const SlotTables&, int)>;
    ScriptedAgent(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
    std::string name() const override { return name_; }
    AgentChoice act(const StateVector& s, const SlotTables& t, int step) override { return fn_(s, t, step); }

private:
    std::string name_;
    Fn fn_;
};

enum class BaselineKind { StaticPolicy, MlHumanDelay };

std::unique_ptr<Agent> make_baseline(BaselineKind kind, MlHumanDelay::Params params = {});

}  // namespace secpol
