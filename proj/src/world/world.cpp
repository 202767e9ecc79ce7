#include "secpol/world/world.hpp"

#include <algorithm>
#include <set>

#include "secpol/policy/guardrails.hpp"

namespace secpol {

namespace {

constexpr double kPrincipalDecay = 0.8;
constexpr double kNoise = 0.05;
constexpr int kClientPoolSize = 16;
constexpr int kBackgroundFlows = 3;
constexpr int kWebPorts[] = {80, 443};
constexpr int kClientOctets[] = {24, 66, 73, 98, 142};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::uint32_t addr_of(const std::string& s) {
    auto a = parse_ipv4(s);
    if (!a) throw WorldError("scenario source is not an IPv4 address: " + s);
    return *a;
}

bool source_denied(const PolicyState& s, const std::string& source, const std::vector<int>& ports) {
    const auto addr = addr_of(source);
    if (ports.empty()) return s.ingress_denied(addr, PortRange::all());
    return std::all_of(ports.begin(), ports.end(), [&](int p) { return s.ingress_denied(addr, p); });
}

bool target_isolated(const PolicyState& s, const std::string& target) {
    auto it = s.instances.find(target);
    return it != s.instances.end() && it->second.isolated;
}

}  // namespace

bool neutralize_holds(const ScenarioRuntime& sc, const PolicyState& s) {
    const auto& sp = sc.script;
    const auto ports = sp.ports();
    const auto all_denied = [&] {
        return std::all_of(sp.sources.begin(), sp.sources.end(),
                           [&](const std::string& src) { return source_denied(s, src, ports); });
    };
    switch (sp.neutralize) {
        case NeutralizeRule::SourceDeniedOrTargetIsolated:
            return all_denied() || target_isolated(s, sp.target);
        case NeutralizeRule::SourceDenied:
            return all_denied();
        case NeutralizeRule::SourcesDeniedFraction: {
            const auto denied = std::count_if(sp.sources.begin(), sp.sources.end(),
                                              [&](const std::string& src) { return source_denied(s, src, ports); });
            return static_cast<double>(denied) >= sp.neutralize_fraction * static_cast<double>(sp.sources.size());
        }
        case NeutralizeRule::PrincipalRestricted: {
            auto it = s.principals.find(sp.principal);
            return it != s.principals.end() && it->second.restricted;
        }
        case NeutralizeRule::RuleRemoved:
            return sc.drift_rule_id >= 0 && s.find_rule(sc.drift_rule_id) == nullptr;
        case NeutralizeRule::Never:
            return false;
    }
    return false;
}

World World::init(const TopologyConfig& topology, std::uint64_t seed) {
    topology.validate();
    World w;
    w.topology_ = topology;
    w.rng_ = Rng(seed);
    for (const auto& i : topology.instances) {
        w.instances_.push_back({i.id, i.tier, i.zone, false, i.monitoring, false});
    }
    for (const auto& p : topology.principals) {
        w.principals_.push_back({p.id, p.privilege, p.restricted, 0.0, false});
    }
    for (int i = 0; i < kClientPoolSize; ++i) {
        const auto o1 = static_cast<std::uint32_t>(kClientOctets[w.rng_.uniform_int(0, 4)]);
        const auto rest = static_cast<std::uint32_t>(w.rng_.uniform_int(0, 0xffffff));
        w.client_pool_.push_back(format_ipv4((o1 << 24) | rest));
    }
    return w;
}

std::size_t World::spawn_scenario(ScenarioScript script) {
    script.validate();
    if (find_scenario(script.id)) throw WorldError("duplicate scenario id '" + script.id + "'");
    if (script.onset < step_) {
        throw WorldError("scenario '" + script.id + "' onset " + std::to_string(script.onset) +
                         " is before the current step " + std::to_string(step_));
    }
    scenarios_.push_back({std::move(script)});
    return scenarios_.size() - 1;
}

const ScenarioRuntime* World::find_scenario(const std::string& id) const {
    for (const auto& s : scenarios_) {
        if (s.script.id == id) return &s;
    }
    return nullptr;
}

const Instance* World::find_instance(const std::string& id) const {
    for (const auto& i : instances_) {
        if (i.id == id) return &i;
    }
    return nullptr;
}

ScenarioStatus World::scenario_status(const std::string& id) const {
    const auto* s = find_scenario(id);
    if (!s) throw WorldError("unknown scenario id '" + id + "'");
    return s->status;
}

void World::inject_trace(std::vector<SecurityEvent> events) {
    int last = trace_queue_.empty() ? step_ + 1 : trace_queue_.back().step;
    for (const auto& e : events) {
        if (e.step <= step_) {
            throw WorldError("trace event at step " + std::to_string(e.step) + " is not after the current step " +
                             std::to_string(step_));
        }
        if (e.step < last) throw WorldError("trace steps must be non-decreasing");
        last = e.step;
    }
    for (auto& e : events) {
        e.origin = EventOrigin::Replay;
        trace_queue_.push_back(std::move(e));
    }
}

void World::sync_from(const PolicyState& s) {
    for (auto& i : instances_) {
        auto it = s.instances.find(i.id);
        if (it == s.instances.end()) continue;
        i.isolated = it->second.isolated;
        i.monitoring_level = it->second.monitoring;
    }
    for (auto& p : principals_) {
        auto it = s.principals.find(p.id);
        if (it != s.principals.end()) p.restricted = it->second.restricted;
    }
}

double World::noisy(double base) { return clamp01(base + rng_.uniform(-kNoise, kNoise)); }

bool World::flow_blocked(const PolicyState& s, const std::string& source, int port,
                         const std::string& target) const {
    if (target_isolated(s, target)) return true;
    auto addr = parse_ipv4(source);
    return addr && s.ingress_denied(*addr, port);
}

void World::conclude(ScenarioRuntime& sc, ScenarioStatus status, StepOutput& out) {
    sc.status = status;
    sc.concluded_step = step_;
    IncidentRecord rec{step_, sc.script.id, status};
    incident_log_.push_back(rec);
    out.incidents.push_back(rec);
    if (status != ScenarioStatus::Breached) return;
    for (auto& i : instances_) {
        if (i.id == sc.script.target) i.compromised = true;
    }
    for (auto& p : principals_) {
        if (p.id == sc.script.principal && sc.script.kind == ScenarioKind::CredCompromise) p.compromised = true;
    }
}

void World::emit_stage(ScenarioRuntime& sc, const Stage& stage, int offset, SecurityConfig& config,
                       StepOutput& out) {
    const auto& sp = sc.script;
    const auto& em = stage.emission;
    const bool malicious = sp.truth_malicious();
    const double base = em.anomaly_start + em.anomaly_slope * (offset - stage.offset);
    const std::size_t before = out.events.size();
    Signature alert_sig = Signature::None;

    if (em.disable_logging && offset == stage.offset) {
        auto it = config.state.principals.find(sp.principal);
        const bool can_act = sp.principal.empty() || it == config.state.principals.end() || !it->second.restricted;
        if (can_act && config.state.flow_logging[sp.logging_zone]) {
            apply_action(config, action::DisableFlowLogging{sp.logging_zone}, {}, step_, Actor::Drift);
            SecurityEvent e{step_, EventKind::ConfigChange, sp.principal.empty() ? "drift" : sp.principal,
                            {{"change", "DisableFlowLogging"}, {"zone", to_string(sp.logging_zone)}},
                            noisy(base), malicious, EventOrigin::Sim};
            out.events.push_back(std::move(e));
        }
    }

    for (int i = 0; i < em.rate; ++i) {
        const int n = sc.emitted++;
        const Signature sig = em.signatures[static_cast<std::size_t>(n) % em.signatures.size()];
        const double anomaly = noisy(base);
        if (em.kind == EventKind::NetFlow) {
            const auto& src = sp.sources[static_cast<std::size_t>(n) % sp.sources.size()];
            const int port = em.ports[static_cast<std::size_t>(n) % em.ports.size()];
            if (flow_blocked(config.state, src, port, sp.target)) continue;
            out.events.push_back({step_, EventKind::NetFlow, src,
                                  {{"dst", sp.target},
                                   {"dst_port", std::to_string(port)},
                                   {"signature", to_string(sig)},
                                   {"bytes", std::to_string(sig == Signature::Flood ? 150000 : 1200)}},
                                  anomaly, malicious, EventOrigin::Sim});
        } else if (em.kind == EventKind::ApiCall) {
            auto it = config.state.principals.find(sp.principal);
            if (it != config.state.principals.end() && it->second.restricted) continue;
            out.events.push_back({step_, EventKind::ApiCall, sp.principal,
                                  {{"api_name", em.api_name}, {"signature", to_string(sig)}},
                                  anomaly, malicious, EventOrigin::Sim});
        }
        alert_sig = sig;
    }

    const bool any = out.events.size() > before;
    if (any && malicious) {
        const auto& first = out.events[before];
        out.events.push_back({step_, EventKind::Alert, first.source,
                              {{"signature", to_string(alert_sig)}, {"dst", sp.target}},
                              noisy(base), true, EventOrigin::Sim});
    }
    if (any && !sc.first_event_step) sc.first_event_step = step_;
}

void World::run_scenario(ScenarioRuntime& sc, SecurityConfig& config, StepOutput& out) {
    const auto& sp = sc.script;
    const int offset = step_ - sp.onset;

    if (offset == 0) {
        for (const auto& st : sp.stages) {
            if (st.offset != 0 || !st.emission.insert_drift_rule) continue;
            auto res = apply_action(config, action::InsertRule{sp.drift_rule}, {}, step_, Actor::Drift);
            const auto& rule = std::get<action::InsertRule>(res.change->action).rule;
            sc.drift_rule_id = rule.id;
            out.events.push_back({step_, EventKind::ConfigChange, "drift",
                                  {{"change", "InsertRule"},
                                   {"rule_id", std::to_string(rule.id)},
                                   {"source_cidr", rule.source.str()},
                                   {"ports", rule.ports.str()}},
                                  noisy(st.emission.anomaly_start), sp.truth_malicious(), EventOrigin::Sim});
            if (!sc.first_event_step) sc.first_event_step = step_;
        }
    }

    if (neutralize_holds(sc, config.state)) {
        conclude(sc, ScenarioStatus::Neutralized, out);
        return;
    }
    if (sp.breach_deadline) {
        int deadline = *sp.breach_deadline;
        if (sp.monitoring_extends_deadline) {
            auto it = config.state.instances.find(sp.target);
            if (it != config.state.instances.end() && it->second.monitoring >= kMaxMonitoringLevel) deadline *= 2;
        }
        if (offset >= deadline) {
            conclude(sc, ScenarioStatus::Breached, out);
            return;
        }
    }
    if (sp.expire_after && offset >= *sp.expire_after) {
        conclude(sc, ScenarioStatus::Expired, out);
        return;
    }

    const Stage* current = nullptr;
    for (const auto& st : sp.stages) {
        if (st.offset <= offset) current = &st;
    }
    if (current) emit_stage(sc, *current, offset, config, out);
}

void World::emit_background(const PolicyState& s, StepOutput& out) {
    std::vector<const Instance*> web;
    for (const auto& i : instances_) {
        if (i.tier == Tier::Web) web.push_back(&i);
    }
    for (int k = 0; k < kBackgroundFlows; ++k) {
        const auto& src = client_pool_[static_cast<std::size_t>(rng_.uniform_int(0, kClientPoolSize - 1))];
        const int port = kWebPorts[rng_.uniform_int(0, 1)];
        const double anomaly = rng_.uniform(0.0, 0.3);
        if (web.empty()) continue;
        const auto* dst = web[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<long>(web.size()) - 1))];
        if (flow_blocked(s, src, port, dst->id)) continue;
        out.events.push_back({step_, EventKind::NetFlow, src,
                              {{"dst", dst->id},
                               {"dst_port", std::to_string(port)},
                               {"signature", "none"},
                               {"bytes", "800"}},
                              anomaly, false, EventOrigin::Sim});
    }
    std::vector<const IamPrincipal*> users;
    for (const auto& p : principals_) {
        if (!p.restricted) users.push_back(&p);
    }
    const double anomaly = rng_.uniform(0.0, 0.2);
    if (users.empty()) return;
    const auto* who = users[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<long>(users.size()) - 1))];
    out.events.push_back({step_, EventKind::ApiCall, who->id,
                          {{"api_name", "DescribeInstances"}, {"signature", "none"}},
                          anomaly, false, EventOrigin::Sim});
}

StepOutput World::step(SecurityConfig& config) {
    ++step_;
    StepOutput out;
    sync_from(config.state);
    for (auto& sc : scenarios_) {
        if (sc.status == ScenarioStatus::Pending && sc.script.onset <= step_) sc.status = ScenarioStatus::Active;
    }
    for (auto& sc : scenarios_) {
        if (sc.status == ScenarioStatus::Active) run_scenario(sc, config, out);
    }
    sync_from(config.state);
    emit_background(config.state, out);
    while (!trace_queue_.empty() && trace_queue_.front().step <= step_) {
        out.events.push_back(std::move(trace_queue_.front()));
        trace_queue_.pop_front();
    }

    for (auto& p : principals_) {
        double m = 0.0;
        for (const auto& e : out.events) {
            if ((e.kind == EventKind::ApiCall || e.kind == EventKind::ConfigChange) && e.source == p.id) {
                m = std::max(m, e.anomaly);
            }
        }
        p.anomaly_score = clamp01(std::max(m, kPrincipalDecay * p.anomaly_score));
    }
    return out;
}

}  // namespace secpol
