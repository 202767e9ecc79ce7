#include "secpol/world/topology.hpp"

#include <set>

#include "secpol/world/events.hpp"

namespace secpol {

namespace {

template <class T>
std::optional<T> lookup(std::string_view s, std::initializer_list<std::pair<const char*, T>> table) {
    for (const auto& [name, v] : table) {
        if (s == name) return v;
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::NetFlow: return "NetFlow";
        case EventKind::ApiCall: return "ApiCall";
        case EventKind::Alert: return "Alert";
        case EventKind::ConfigChange: return "ConfigChange";
    }
    return "?";
}

const char* to_string(Signature s) {
    switch (s) {
        case Signature::None: return "none";
        case Signature::Scan: return "scan";
        case Signature::Flood: return "flood";
        case Signature::Sqli: return "sqli";
        case Signature::Xss: return "xss";
        case Signature::Privesc: return "privesc";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
    return lookup<EventKind>(s, {{"NetFlow", EventKind::NetFlow},
                                 {"ApiCall", EventKind::ApiCall},
                                 {"Alert", EventKind::Alert},
                                 {"ConfigChange", EventKind::ConfigChange}});
}

std::optional<Signature> parse_signature(std::string_view s) {
    return lookup<Signature>(s, {{"none", Signature::None},
                                 {"scan", Signature::Scan},
                                 {"flood", Signature::Flood},
                                 {"sqli", Signature::Sqli},
                                 {"xss", Signature::Xss},
                                 {"privesc", Signature::Privesc}});
}

Signature ObservedEvent::signature() const {
    auto it = attrs.find("signature");
    if (it == attrs.end()) return Signature::None;
    return parse_signature(it->second).value_or(Signature::None);
}

int ObservedEvent::dst_port() const {
    auto it = attrs.find("dst_port");
    if (it == attrs.end()) return -1;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        return -1;
    }
}

std::string ObservedEvent::attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string() : it->second;
}

ObservedEvent observe(const SecurityEvent& e) {
    return ObservedEvent{e.step, e.kind, e.source, e.attrs, e.anomaly, e.origin};
}

TopologyConfig TopologyConfig::default_topology() {
    return build(2, 1, Zone::Private, 2, 0, 1, 0);
}

TopologyConfig TopologyConfig::build(int web, int db, Zone db_zone, int admins, int power_users,
                                     int service_accounts, int read_only) {
    TopologyConfig t;
    for (int i = 0; i < web; ++i) t.instances.push_back({"web-" + std::to_string(i), Tier::Web, Zone::Public, 1});
    for (int i = 0; i < db; ++i) t.instances.push_back({"db-" + std::to_string(i), Tier::Db, db_zone, 1});
    for (int i = 0; i < admins; ++i) t.principals.push_back({"admin-" + std::to_string(i), Privilege::Admin, false});
    for (int i = 0; i < power_users; ++i) {
        t.principals.push_back({"dev-" + std::to_string(i), Privilege::PowerUser, false});
    }
    for (int i = 0; i < service_accounts; ++i) {
        t.principals.push_back({"svc-" + std::to_string(i), Privilege::PowerUser, true});
    }
    for (int i = 0; i < read_only; ++i) t.principals.push_back({"audit-" + std::to_string(i), Privilege::ReadOnly, false});
    return t;
}

void TopologyConfig::validate() const {
    std::set<std::string> ids;
    for (const auto& i : instances) {
        if (i.tier == Tier::Db && i.zone != Zone::Private) {
            throw TopologyError("T1", "Db instance '" + i.id + "' must be in the Private zone");
        }
        if (i.id.empty() || !ids.insert(i.id).second) {
            throw TopologyError("T2", "instance id '" + i.id + "' empty or duplicated");
        }
        if (i.monitoring < 0 || i.monitoring > kMaxMonitoringLevel) {
            throw TopologyError("T3", "instance '" + i.id + "' monitoring level out of [0, 2]");
        }
    }
    for (const auto& p : principals) {
        if (p.id.empty() || !ids.insert(p.id).second) {
            throw TopologyError("T2", "principal id '" + p.id + "' empty or duplicated");
        }
    }
}

SecurityConfig baseline_config(const TopologyConfig& topology) {
    topology.validate();
    PolicyState s;
    const auto add = [&](Cidr src, PortRange ports, Verb verb, Direction dir = Direction::Ingress) {
        s.rules.push_back({s.next_rule_id++, dir, src, ports, verb, RuleOrigin::Baseline});
    };
    add(Cidr::any(), PortRange::single(80), Verb::Allow);
    add(Cidr::any(), PortRange::single(443), Verb::Allow);
    add(kVpcCidr, PortRange::single(kDbPort), Verb::Allow);
    add(kVpcCidr, PortRange::single(kSshPort), Verb::Allow);
    add(kBlocklistCidr, PortRange::all(), Verb::Deny);
    add(Cidr::any(), PortRange::all(), Verb::Allow, Direction::Egress);

    for (const auto& p : topology.principals) s.principals[p.id] = {p.privilege, p.restricted};
    for (const auto& i : topology.instances) {
        s.instances[i.id] = {i.tier, i.zone, false, i.monitoring, i.monitoring};
    }
    s.flow_logging[Zone::Public] = true;
    s.flow_logging[Zone::Private] = true;
    return SecurityConfig(std::move(s));
}

}  // namespace secpol
