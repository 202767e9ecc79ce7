#include "secpol/harness/agents.hpp"

#include <algorithm>

namespace secpol {

MlHumanDelay::MlHumanDelay(Params p) : p_(p) {
    if (p_.delay_min < 1 || p_.delay_max < p_.delay_min) throw std::invalid_argument("invalid delay range");
}

void MlHumanDelay::begin_episode(std::uint64_t seed) {
    rng_ = Rng(derive_seed(seed, 31));
    handled_.clear();
    queue_.clear();
    delays_.clear();
}

AgentChoice MlHumanDelay::act(const StateVector& state, const SlotTables& tables, int step) {
    if (state[feat::kMaxAnomaly] >= p_.threshold) {
        const Candidate* top = nullptr;
        for (auto t : {ActionType::BlockTraffic, ActionType::RestrictUser, ActionType::IsolateInstance,
                       ActionType::IncreaseMonitoring}) {
            const auto& list = tables.of(t);
            if (list.empty()) continue;
            // Strictly greater keeps ties with the earlier type.
            if (!top || list.front().score > top->score) top = &list.front();
        }
        if (top && handled_.insert(top->label).second) {
            const int d = static_cast<int>(rng_.uniform_int(p_.delay_min, p_.delay_max));
            delays_.push_back(d);
            // The action issued at observation step t lands in world step t + 1.
            queue_.push_back({step + d - 1, top->action});
        }
    }
    auto due = std::min_element(queue_.begin(), queue_.end(),
                                [](const Pending& a, const Pending& b) { return a.due < b.due; });
    if (due != queue_.end() && due->due <= step) {
        auto a = due->action;
        queue_.erase(due);
        return a;
    }
    return ActionId{0};
}

std::unique_ptr<Agent> make_baseline(BaselineKind kind, MlHumanDelay::Params params) {
    if (kind == BaselineKind::StaticPolicy) return std::make_unique<StaticPolicy>();
    return std::make_unique<MlHumanDelay>(params);
}

}  // namespace secpol
