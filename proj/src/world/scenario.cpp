#include "secpol/world/scenario.hpp"

#include <algorithm>
#include <set>

namespace secpol {

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::PortScan: return "PortScan";
        case ScenarioKind::DDoS: return "DDoS";
        case ScenarioKind::WebExploit: return "WebExploit";
        case ScenarioKind::CredCompromise: return "CredCompromise";
        case ScenarioKind::BenignAdminBurst: return "BenignAdminBurst";
        case ScenarioKind::ConfigDrift: return "ConfigDrift";
    }
    return "?";
}

const char* to_string(ScenarioStatus s) {
    switch (s) {
        case ScenarioStatus::Pending: return "Pending";
        case ScenarioStatus::Active: return "Active";
        case ScenarioStatus::Neutralized: return "Neutralized";
        case ScenarioStatus::Breached: return "Breached";
        case ScenarioStatus::Expired: return "Expired";
    }
    return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) {
    for (int i = 0; i < kScenarioKindCount; ++i) {
        const auto k = static_cast<ScenarioKind>(i);
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

bool is_attack(ScenarioKind k) {
    return k == ScenarioKind::PortScan || k == ScenarioKind::DDoS || k == ScenarioKind::WebExploit ||
           k == ScenarioKind::CredCompromise;
}

bool is_concluded(ScenarioStatus s) {
    return s == ScenarioStatus::Neutralized || s == ScenarioStatus::Breached || s == ScenarioStatus::Expired;
}

std::vector<int> ScenarioScript::ports() const {
    std::set<int> all;
    for (const auto& st : stages) all.insert(st.emission.ports.begin(), st.emission.ports.end());
    return {all.begin(), all.end()};
}

void ScenarioScript::validate() const {
    const auto fail = [&](const std::string& what) { throw ScenarioError("scenario '" + id + "': " + what); };
    if (id.empty()) fail("empty id");
    if (onset < 0) fail("negative onset");
    if (stages.empty()) fail("no stages");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const auto& st = stages[i];
        if (st.offset < 0) fail("negative stage offset");
        if (i > 0 && st.offset <= stages[i - 1].offset) fail("stage offsets must be strictly increasing");
        const auto& em = st.emission;
        if (em.rate < 0) fail("negative emission rate");
        if (em.anomaly_start < 0.0 || em.anomaly_start > 1.0) fail("anomaly_start outside [0, 1]");
        if (em.kind == EventKind::NetFlow && em.rate > 0 && em.ports.empty()) fail("NetFlow stage without ports");
        if (em.signatures.empty()) fail("stage without signatures");
    }
    if (breach_deadline && *breach_deadline < stages.back().offset) fail("breach_deadline before last stage");
    if (expire_after && *expire_after <= 0) fail("expire_after must be positive");
    switch (neutralize) {
        case NeutralizeRule::SourceDenied:
        case NeutralizeRule::SourcesDeniedFraction:
        case NeutralizeRule::SourceDeniedOrTargetIsolated:
            if (sources.empty()) fail("source-based neutralization needs sources");
            break;
        case NeutralizeRule::PrincipalRestricted:
            if (principal.empty()) fail("principal-based neutralization needs a principal");
            break;
        default: break;
    }
    if (neutralize_fraction <= 0.0 || neutralize_fraction > 1.0) fail("neutralize_fraction outside (0, 1]");
}

ScenarioScript make_default_script(ScenarioKind kind, std::string id, int onset, const ScenarioTargets& t) {
    ScenarioScript s;
    s.id = std::move(id);
    s.kind = kind;
    s.onset = onset;
    s.baseline_blockable = t.baseline_blockable;
    s.sources = t.sources;
    s.target = t.target;
    s.principal = t.principal;
    s.logging_zone = t.logging_zone;

    switch (kind) {
        case ScenarioKind::PortScan: {
            EmissionSpec scan{EventKind::NetFlow, {Signature::Scan}, 5, 0.72, 0.01,
                              {22, 23, 80, 443, 3306, 3389, 8080, 5432}};
            EmissionSpec exploit{EventKind::NetFlow, {Signature::Sqli}, 3, 0.85, 0.01, {80}};
            s.stages = {{0, scan}, {12, exploit}};
            s.breach_deadline = 24;
            s.neutralize = NeutralizeRule::SourceDeniedOrTargetIsolated;
            break;
        }
        case ScenarioKind::DDoS: {
            EmissionSpec flood{EventKind::NetFlow, {Signature::Flood}, 8, 0.8, 0.005, {443}};
            s.stages = {{0, flood}};
            s.breach_deadline = 18;
            s.neutralize = NeutralizeRule::SourcesDeniedFraction;
            s.neutralize_fraction = 0.75;
            break;
        }
        case ScenarioKind::WebExploit: {
            EmissionSpec web{EventKind::NetFlow, {Signature::Sqli, Signature::Xss}, 3, 0.75, 0.01, {443}};
            s.stages = {{0, web}};
            s.breach_deadline = 20;
            s.monitoring_extends_deadline = true;
            s.neutralize = NeutralizeRule::SourceDenied;
            break;
        }
        case ScenarioKind::CredCompromise: {
            EmissionSpec calls{EventKind::ApiCall, {Signature::Privesc}, 2, 0.75, 0.01, {}, "AttachUserPolicy"};
            EmissionSpec cover{EventKind::ApiCall, {Signature::Privesc}, 2, 0.8, 0.01, {}, "CreateAccessKey"};
            cover.disable_logging = true;
            s.stages = {{0, calls}, {4, cover}};
            s.breach_deadline = 20;
            s.neutralize = NeutralizeRule::PrincipalRestricted;
            break;
        }
        case ScenarioKind::BenignAdminBurst: {
            EmissionSpec burst{EventKind::ApiCall, {Signature::None}, 3, 0.6, 0.0, {}, "RunInstances"};
            s.stages = {{0, burst}};
            s.expire_after = 40;
            s.neutralize = NeutralizeRule::Never;
            break;
        }
        case ScenarioKind::ConfigDrift: {
            EmissionSpec change{EventKind::ConfigChange, {Signature::None}, 0, 0.8, 0.0};
            change.insert_drift_rule = true;
            s.stages = {{0, change}};
            s.neutralize = NeutralizeRule::RuleRemoved;
            s.drift_rule = FirewallRule{0, Direction::Ingress, Cidr::any(), PortRange::single(kSshPort),
                                        Verb::Allow, RuleOrigin::Drift};
            break;
        }
    }
    return s;
}

}  // namespace secpol
