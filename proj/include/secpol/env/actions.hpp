#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "secpol/policy/config.hpp"

namespace secpol {

enum class ActionType { BlockTraffic, RestrictUser, OpenPort, IsolateInstance, IncreaseMonitoring };

inline constexpr int kActionTypeCount = 5;
inline constexpr int kSlotCount = 4;
inline constexpr int kActionCount = 1 + kActionTypeCount * kSlotCount;  // 21

const char* to_string(ActionType t);

/// Flattened discrete action index: 0 is NoOp, 1 + type * 4 + slot otherwise.
using ActionId = int;

ActionId encode_action(ActionType type, int slot);

struct DecodedAction {
    bool noop = true;
    ActionType type = ActionType::BlockTraffic;
    int slot = 0;
    bool operator==(const DecodedAction&) const = default;
};

/// Throws std::out_of_range when `a` is not in [0, 21).
DecodedAction decode_action_id(ActionId a);

/// One ranked target for an action type.
struct Candidate {
    std::string label;  // stable identity, e.g. "src/45.1.2.3" or "rule/7"
    double score = 0.0;
    ConcreteAction action;
    bool operator==(const Candidate&) const = default;
};

struct SlotTables {
    std::array<std::vector<Candidate>, kActionTypeCount> slots;

    const std::vector<Candidate>& of(ActionType t) const { return slots[static_cast<std::size_t>(t)]; }
    std::vector<Candidate>& of(ActionType t) { return slots[static_cast<std::size_t>(t)]; }
    bool empty() const;
    bool operator==(const SlotTables&) const = default;
};

struct ResolvedAction {
    ConcreteAction action;  // NoOp for id 0 and for empty slots
    bool fallback = false;  // the slot was empty
    std::optional<ActionType> type;
};

/// Maps an action id to its concrete target. Throws std::out_of_range.
ResolvedAction resolve_action(ActionId a, const SlotTables& tables);

}  // namespace secpol
