#include "secpol/policy/config.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace secpol {

const char* to_string(Direction d) { return d == Direction::Ingress ? "Ingress" : "Egress"; }
const char* to_string(Verb v) { return v == Verb::Allow ? "Allow" : "Deny"; }
const char* to_string(RuleOrigin o) {
    switch (o) {
        case RuleOrigin::Baseline: return "Baseline";
        case RuleOrigin::Agent: return "Agent";
        case RuleOrigin::Drift: return "Drift";
    }
    return "?";
}
const char* to_string(Tier t) { return t == Tier::Web ? "Web" : "Db"; }
const char* to_string(Zone z) { return z == Zone::Public ? "Public" : "Private"; }
const char* to_string(Privilege p) {
    switch (p) {
        case Privilege::ReadOnly: return "ReadOnly";
        case Privilege::PowerUser: return "PowerUser";
        case Privilege::Admin: return "Admin";
    }
    return "?";
}
const char* to_string(Actor a) {
    switch (a) {
        case Actor::Agent: return "Agent";
        case Actor::Baseline: return "Baseline";
        case Actor::Drift: return "Drift";
    }
    return "?";
}

std::optional<Tier> parse_tier(std::string_view s) {
    if (s == "Web") return Tier::Web;
    if (s == "Db") return Tier::Db;
    return std::nullopt;
}
std::optional<Zone> parse_zone(std::string_view s) {
    if (s == "Public") return Zone::Public;
    if (s == "Private") return Zone::Private;
    return std::nullopt;
}
std::optional<Privilege> parse_privilege(std::string_view s) {
    if (s == "ReadOnly") return Privilege::ReadOnly;
    if (s == "PowerUser") return Privilege::PowerUser;
    if (s == "Admin") return Privilege::Admin;
    return std::nullopt;
}

const FirewallRule* PolicyState::find_rule(int id) const {
    auto it = std::lower_bound(rules.begin(), rules.end(), id,
                               [](const FirewallRule& r, int v) { return r.id < v; });
    return (it != rules.end() && it->id == id) ? &*it : nullptr;
}

bool PolicyState::ingress_denied(std::uint32_t addr, int port) const {
    return std::any_of(rules.begin(), rules.end(), [&](const FirewallRule& r) {
        return r.direction == Direction::Ingress && r.verb == Verb::Deny &&
               r.source.contains(addr) && r.ports.contains(port);
    });
}

bool PolicyState::ingress_denied(std::uint32_t addr, const PortRange& ports) const {
    // Union of the covering denies' port ranges must span `ports`.
    std::vector<PortRange> covering;
    for (const auto& r : rules) {
        if (r.direction == Direction::Ingress && r.verb == Verb::Deny && r.source.contains(addr)) {
            covering.push_back(r.ports);
        }
    }
    std::sort(covering.begin(), covering.end());
    int next = ports.lo;
    for (const auto& pr : covering) {
        if (pr.lo > next) break;
        next = std::max(next, pr.hi + 1);
        if (next > ports.hi) return true;
    }
    return next > ports.hi;
}

int PolicyState::monitoring_units() const {
    int units = 0;
    for (const auto& [id, inst] : instances) {
        units += std::max(0, inst.monitoring - inst.baseline_monitoring);
    }
    return units;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<FirewallRule>::iterator rule_iter(PolicyState& s, int id) {
    auto it = std::lower_bound(s.rules.begin(), s.rules.end(), id,
                               [](const FirewallRule& r, int v) { return r.id < v; });
    if (it == s.rules.end() || it->id != id) {
        throw PolicyError(PolicyError::Kind::TargetNotFound, "no firewall rule " + std::to_string(id));
    }
    return it;
}

PrincipalPolicy& principal(PolicyState& s, const std::string& id) {
    auto it = s.principals.find(id);
    if (it == s.principals.end()) {
        throw PolicyError(PolicyError::Kind::TargetNotFound, "no principal '" + id + "'");
    }
    return it->second;
}

InstanceControl& instance(PolicyState& s, const std::string& id) {
    auto it = s.instances.find(id);
    if (it == s.instances.end()) {
        throw PolicyError(PolicyError::Kind::TargetNotFound, "no instance '" + id + "'");
    }
    return it->second;
}

bool& zone_logging(PolicyState& s, Zone z) {
    auto it = s.flow_logging.find(z);
    if (it == s.flow_logging.end()) {
        throw PolicyError(PolicyError::Kind::TargetNotFound, std::string("no zone ") + to_string(z));
    }
    return it->second;
}

void add_rule(PolicyState& s, FirewallRule r) {
    if (!r.ports.valid()) {
        throw PolicyError(PolicyError::Kind::Malformed, "port range out of order or out of bounds");
    }
    r.id = s.next_rule_id++;
    s.rules.push_back(r);  // ids are handed out increasing, so order is kept
}

}  // namespace

std::string describe(const ConcreteAction& a) {
    return std::visit(
        overloaded{
            [](const action::NoOp&) { return std::string("NoOp"); },
            [](const action::BlockSource& x) { return "BlockTraffic(" + x.source.str() + ")"; },
            [](const action::RevokeRule& x) { return "BlockTraffic(rule:" + std::to_string(x.rule_id) + ")"; },
            [](const action::RestrictPrincipal& x) { return "RestrictUser(" + x.principal + ")"; },
            [](const action::OpenPort& x) { return "OpenPort(rule:" + std::to_string(x.rule_id) + ")"; },
            [](const action::IsolateInstance& x) { return "IsolateInstance(" + x.instance + ")"; },
            [](const action::RaiseMonitoring& x) { return "IncreaseMonitoring(" + x.instance + ")"; },
            [](const action::EnableFlowLogging& x) {
                return std::string("IncreaseMonitoring(zone:") + to_string(x.zone) + ")";
            },
            [](const action::InsertRule& x) {
                return std::string("InsertRule(") + to_string(x.rule.verb) + " " + x.rule.source.str() + ":" +
                       x.rule.ports.str() + ")";
            },
            [](const action::DisableFlowLogging& x) {
                return std::string("DisableFlowLogging(") + to_string(x.zone) + ")";
            },
            [](const action::Rollback& x) { return "Rollback(v" + std::to_string(x.target_version) + ")"; },
        },
        a);
}

bool is_defensive(const ConcreteAction& a) {
    return std::holds_alternative<action::BlockSource>(a) ||
           std::holds_alternative<action::RestrictPrincipal>(a) ||
           std::holds_alternative<action::IsolateInstance>(a);
}

SecurityConfig::SecurityConfig(PolicyState initial, int initial_version_)
    : state(std::move(initial)),
      version(initial_version_),
      initial_version(initial_version_),
      origin(std::make_shared<const PolicyState>(state)) {}

void mutate(PolicyState& s, const ConcreteAction& a) {
    std::visit(overloaded{
                   [](const action::NoOp&) {},
                   [&](const action::BlockSource& x) {
                       add_rule(s, FirewallRule{0, Direction::Ingress, x.source, PortRange::all(),
                                                Verb::Deny, RuleOrigin::Agent});
                   },
                   [&](const action::RevokeRule& x) { s.rules.erase(rule_iter(s, x.rule_id)); },
                   [&](const action::RestrictPrincipal& x) { principal(s, x.principal).restricted = true; },
                   [&](const action::OpenPort& x) {
                       auto it = rule_iter(s, x.rule_id);
                       if (it->origin != RuleOrigin::Agent || it->verb != Verb::Deny) {
                           throw PolicyError(PolicyError::Kind::TargetNotFound,
                                             "rule " + std::to_string(x.rule_id) + " is not an agent deny");
                       }
                       s.rules.erase(it);
                   },
                   [&](const action::IsolateInstance& x) { instance(s, x.instance).isolated = true; },
                   [&](const action::RaiseMonitoring& x) {
                       auto& inst = instance(s, x.instance);
                       inst.monitoring = std::min(kMaxMonitoringLevel, inst.monitoring + 1);
                   },
                   [&](const action::EnableFlowLogging& x) { zone_logging(s, x.zone) = true; },
                   [&](const action::InsertRule& x) { add_rule(s, x.rule); },
                   [&](const action::DisableFlowLogging& x) { zone_logging(s, x.zone) = false; },
                   [](const action::Rollback&) {
                       throw PolicyError(PolicyError::Kind::Malformed, "rollback needs config history");
                   },
               },
               a);
}

PolicyState state_at(const SecurityConfig& config, int version) {
    if (version < config.initial_version || version > config.version) {
        throw PolicyError(PolicyError::Kind::UnknownVersion,
                          "version " + std::to_string(version) + " outside [" +
                              std::to_string(config.initial_version) + ", " +
                              std::to_string(config.version) + "]");
    }
    PolicyState s = *config.origin;
    const auto n = static_cast<std::size_t>(version - config.initial_version);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ch = config.change_log[i];
        if (const auto* rb = std::get_if<action::Rollback>(&ch.action)) {
            s = state_at(config, rb->target_version);
        } else {
            mutate(s, ch.action);
        }
    }
    return s;
}

namespace {

auto rule_sort_key(const FirewallRule& r) {
    return std::make_tuple(r.direction, r.verb, r.source, r.ports, r.origin, r.id);
}

std::string rule_text(const FirewallRule& r) {
    std::ostringstream os;
    os << to_string(r.direction) << ' ' << to_string(r.verb) << ' ' << r.source.str() << ' '
       << r.ports.lo << '-' << r.ports.hi << ' ' << to_string(r.origin);
    return os.str();
}

}  // namespace

std::string to_canonical_text(const SecurityConfig& config) {
    const auto& s = config.state;
    std::ostringstream os;
    os << "version " << config.version << '\n';
    std::vector<const FirewallRule*> sorted;
    for (const auto& r : s.rules) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return rule_sort_key(*a) < rule_sort_key(*b); });
    for (const auto* r : sorted) os << "rule " << r->id << ' ' << rule_text(*r) << '\n';
    for (const auto& [id, p] : s.principals) {
        os << "principal " << id << ' ' << to_string(p.privilege) << " restricted=" << p.restricted << '\n';
    }
    for (const auto& [id, i] : s.instances) {
        os << "instance " << id << ' ' << to_string(i.tier) << ' ' << to_string(i.zone)
           << " isolated=" << i.isolated << " monitoring=" << i.monitoring
           << " baseline=" << i.baseline_monitoring << '\n';
    }
    for (const auto& [z, on] : s.flow_logging) os << "flow_logging " << to_string(z) << ' ' << on << '\n';
    return os.str();
}

namespace {

template <class Map, class Fn>
void diff_maps(const Map& a, const Map& b, const std::string& prefix, std::vector<FieldChange>& out,
               Fn&& fields) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            out.push_back({DiffKind::Removed, prefix + ia->first, "present", ""});
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            out.push_back({DiffKind::Added, prefix + ib->first, "", "present"});
            ++ib;
        } else {
            fields(prefix + ia->first, ia->second, ib->second, out);
            ++ia;
            ++ib;
        }
    }
}

void field(std::vector<FieldChange>& out, const std::string& path, const std::string& before,
           const std::string& after) {
    if (before != after) out.push_back({DiffKind::Modified, path, before, after});
}

}  // namespace

std::vector<FieldChange> config_diff(const PolicyState& a, const PolicyState& b) {
    std::vector<FieldChange> out;

    std::map<int, const FirewallRule*> ra, rb;
    for (const auto& r : a.rules) ra[r.id] = &r;
    for (const auto& r : b.rules) rb[r.id] = &r;
    auto ia = ra.begin();
    auto ib = rb.begin();
    while (ia != ra.end() || ib != rb.end()) {
        if (ib == rb.end() || (ia != ra.end() && ia->first < ib->first)) {
            out.push_back({DiffKind::Removed, "rule/" + std::to_string(ia->first), rule_text(*ia->second), ""});
            ++ia;
        } else if (ia == ra.end() || ib->first < ia->first) {
            out.push_back({DiffKind::Added, "rule/" + std::to_string(ib->first), "", rule_text(*ib->second)});
            ++ib;
        } else {
            field(out, "rule/" + std::to_string(ia->first), rule_text(*ia->second), rule_text(*ib->second));
            ++ia;
            ++ib;
        }
    }

    diff_maps(a.principals, b.principals, "principal/", out,
              [](const std::string& p, const PrincipalPolicy& x, const PrincipalPolicy& y, auto& o) {
                  field(o, p + "/privilege", to_string(x.privilege), to_string(y.privilege));
                  field(o, p + "/restricted", std::to_string(x.restricted), std::to_string(y.restricted));
              });
    diff_maps(a.instances, b.instances, "instance/", out,
              [](const std::string& p, const InstanceControl& x, const InstanceControl& y, auto& o) {
                  field(o, p + "/tier", to_string(x.tier), to_string(y.tier));
                  field(o, p + "/zone", to_string(x.zone), to_string(y.zone));
                  field(o, p + "/isolated", std::to_string(x.isolated), std::to_string(y.isolated));
                  field(o, p + "/monitoring", std::to_string(x.monitoring), std::to_string(y.monitoring));
                  field(o, p + "/baseline_monitoring", std::to_string(x.baseline_monitoring),
                        std::to_string(y.baseline_monitoring));
              });

    std::map<std::string, bool> la, lb;
    for (const auto& [z, on] : a.flow_logging) la[to_string(z)] = on;
    for (const auto& [z, on] : b.flow_logging) lb[to_string(z)] = on;
    diff_maps(la, lb, "flow_logging/", out, [](const std::string& p, bool x, bool y, auto& o) {
        field(o, p, std::to_string(x), std::to_string(y));
    });
    return out;
}

std::vector<FieldChange> config_diff(const SecurityConfig& a, const SecurityConfig& b) {
    return config_diff(a.state, b.state);
}

}  // namespace secpol
