#include "secpol/env/features.hpp"

#include <algorithm>
#include <cmath>

#include "secpol/world/compliance.hpp"

namespace secpol {

namespace {

double ratio(double num, double den) { return den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0; }

}  // namespace

StateVector extract_features(const EventWindow& window, const PolicyState& state, const WorldView& view,
                             const SlotTables& tables, const FeatureContext& ctx) {
    StateVector f{};

    int agent_denies = 0, world_open = 0;
    for (const auto& r : state.rules) {
        if (r.origin == RuleOrigin::Agent && r.verb == Verb::Deny) ++agent_denies;
        if (r.direction == Direction::Ingress && r.verb == Verb::Allow && r.source == Cidr::any()) ++world_open;
    }
    const auto rules = static_cast<double>(state.rules.size());
    f[feat::kRuleCount] = ratio(rules, kRuleScale);
    f[feat::kAgentDenyFraction] = ratio(agent_denies, rules);
    f[feat::kWorldOpenRules] = ratio(world_open, kWorldOpenCap);

    int alerts = 0;
    double max_anomaly = 0.0;
    bool sig[4] = {false, false, false, false};
    window.for_each([&](const ObservedEvent& e) {
        if (!event_live(e, state)) return;
        max_anomaly = std::max(max_anomaly, e.anomaly);
        if (e.kind == EventKind::Alert) ++alerts;
        switch (e.signature()) {
            case Signature::Scan: sig[0] = true; break;
            case Signature::Flood: sig[1] = true; break;
            case Signature::Sqli:
            case Signature::Xss: sig[2] = true; break;
            case Signature::Privesc: sig[3] = true; break;
            case Signature::None: break;
        }
    });
    f[feat::kAlertCount] = ratio(std::min(alerts, kAlertCap), kAlertCap);
    f[feat::kMaxAnomaly] = std::clamp(max_anomaly, 0.0, 1.0);
    for (int i = 0; i < 4; ++i) f[feat::kSigScan + i] = sig[i] ? 1.0 : 0.0;

    int anomalous = 0;
    for (const auto& p : view.principals) {
        if (!p.restricted && p.anomaly_score >= kSuspicionThreshold) ++anomalous;
    }
    f[feat::kAnomalousPrincipals] = ratio(anomalous, 4);

    const bool c[4] = {c1_violated(state), c2_violated(state), c3_violated(state), c4_violated(state)};
    const int violations = c[0] + c[1] + c[2] + c[3];
    f[feat::kViolationCount] = ratio(violations, 4);
    for (int i = 0; i < 4; ++i) f[feat::kC1 + i] = c[i] ? 1.0 : 0.0;

    int isolated = 0, levels = 0;
    for (const auto& [id, inst] : state.instances) {
        if (inst.isolated) ++isolated;
        levels += inst.monitoring;
    }
    const auto n_inst = static_cast<double>(state.instances.size());
    f[feat::kIsolatedFraction] = ratio(isolated, n_inst);
    f[feat::kMonitoringCoverage] = ratio(levels, n_inst * kMaxMonitoringLevel);
    f[feat::kResourceIndex] = ratio(state.monitoring_units(), kResourceCap);

    bool live_alert = false;
    for (const auto& e : window.latest()) {
        if (e.kind == EventKind::Alert && event_live(e, state)) live_alert = true;
    }
    f[feat::kActiveIncident] = live_alert ? 1.0 : 0.0;

    const int last = ctx.last_action ? 1 + static_cast<int>(*ctx.last_action) : 0;
    f[feat::kLastAction + last] = 1.0;

    f[feat::kSinceChange] = ratio(ctx.step - ctx.last_change_step, ctx.episode_len);
    for (int t = 0; t < kActionTypeCount; ++t) {
        f[feat::kSlotOccupancy + t] = ratio(static_cast<double>(tables.slots[static_cast<std::size_t>(t)].size()), kSlotCount);
    }
    f[feat::kProgress] = ratio(ctx.step, ctx.episode_len);
    return f;
}

}  // namespace secpol
