#include "secpol/env/actions.hpp"

#include <stdexcept>

namespace secpol {

const char* to_string(ActionType t) {
    switch (t) {
        case ActionType::BlockTraffic: return "BlockTraffic";
        case ActionType::RestrictUser: return "RestrictUser";
        case ActionType::OpenPort: return "OpenPort";
        case ActionType::IsolateInstance: return "IsolateInstance";
        case ActionType::IncreaseMonitoring: return "IncreaseMonitoring";
    }
    return "?";
}

ActionId encode_action(ActionType type, int slot) {
    if (slot < 0 || slot >= kSlotCount) throw std::out_of_range("slot out of range");
    return 1 + static_cast<int>(type) * kSlotCount + slot;
}

DecodedAction decode_action_id(ActionId a) {
    if (a < 0 || a >= kActionCount) throw std::out_of_range("action id " + std::to_string(a) + " out of range");
    if (a == 0) return {};
    return {false, static_cast<ActionType>((a - 1) / kSlotCount), (a - 1) % kSlotCount};
}

bool SlotTables::empty() const {
    for (const auto& s : slots) {
        if (!s.empty()) return false;
    }
    return true;
}

ResolvedAction resolve_action(ActionId a, const SlotTables& tables) {
    const auto d = decode_action_id(a);
    if (d.noop) return {action::NoOp{}, false, std::nullopt};
    const auto& list = tables.of(d.type);
    if (d.slot >= static_cast<int>(list.size())) return {action::NoOp{}, true, d.type};
    return {list[static_cast<std::size_t>(d.slot)].action, false, d.type};
}

}  // namespace secpol
