#include "secpol/env/candidates.hpp"

#include <algorithm>
#include <map>

#include "secpol/world/compliance.hpp"

namespace secpol {

WorldView view_of(const World& world) {
    WorldView v;
    v.step = world.current_step();
    for (const auto& i : world.instances()) v.instances.push_back({i.id, i.tier, i.zone, i.isolated, i.monitoring_level});
    for (const auto& p : world.principals()) v.principals.push_back({p.id, p.privilege, p.restricted, p.anomaly_score});
    return v;
}

EventWindow::EventWindow(int width) : width_(width) {
    if (width < 1) throw std::invalid_argument("window width must be >= 1");
}

void EventWindow::push(int step, std::vector<ObservedEvent> events) {
    steps_.push_back({step, std::move(events)});
    while (!steps_.empty() && steps_.front().step <= step - width_) steps_.pop_front();
}

const std::vector<ObservedEvent>& EventWindow::latest() const {
    static const std::vector<ObservedEvent> none;
    return steps_.empty() ? none : steps_.back().events;
}

std::size_t EventWindow::size() const {
    std::size_t n = 0;
    for (const auto& s : steps_) n += s.events.size();
    return n;
}

bool event_live(const ObservedEvent& e, const PolicyState& s) {
    const auto dst = e.attr("dst");
    if (!dst.empty()) {
        auto it = s.instances.find(dst);
        if (it != s.instances.end() && it->second.isolated) return false;
    }
    if (auto addr = parse_ipv4(e.source)) {
        const int port = e.dst_port();
        return port >= 0 ? !s.ingress_denied(*addr, port) : !s.ingress_denied(*addr, PortRange::all());
    }
    auto p = s.principals.find(e.source);
    if (p != s.principals.end() && p->second.restricted) return false;
    if (e.kind == EventKind::ConfigChange) {
        const auto change = e.attr("change");
        if (change == "InsertRule") {
            try {
                return s.find_rule(std::stoi(e.attr("rule_id"))) != nullptr;
            } catch (const std::exception&) {
                return true;
            }
        }
        if (change == "DisableFlowLogging") {
            auto z = parse_zone(e.attr("zone"));
            if (z) {
                auto it = s.flow_logging.find(*z);
                return it == s.flow_logging.end() || !it->second;
            }
        }
    }
    return true;
}

namespace {

void finish(std::vector<Candidate>& list) {
    std::stable_sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.label < b.label;
    });
    if (list.size() > static_cast<std::size_t>(kSlotCount)) list.resize(kSlotCount);
}

}  // namespace

SlotTables rank_candidates(const EventWindow& window, const PolicyState& state, const WorldView& view) {
    SlotTables t;

    // Window maxima over live events.
    std::map<std::uint32_t, double> src_anomaly;
    std::map<std::string, double> dst_anomaly;
    window.for_each([&](const ObservedEvent& e) {
        if (e.kind != EventKind::NetFlow && e.kind != EventKind::Alert) return;
        if (!event_live(e, state)) return;
        if (auto addr = parse_ipv4(e.source)) {
            auto& m = src_anomaly[*addr];
            m = std::max(m, e.anomaly);
        }
        const auto dst = e.attr("dst");
        if (e.kind == EventKind::NetFlow && !dst.empty()) {
            auto& m = dst_anomaly[dst];
            m = std::max(m, e.anomaly);
        }
    });

    // BlockTraffic: open non-compliant rules first, then sources.
    {
        std::vector<Candidate> rules, sources;
        for (const auto& r : state.rules) {
            if (is_c1_violating_rule(r)) {
                rules.push_back({"rule/" + std::to_string(r.id), 1.0, action::RevokeRule{r.id}});
            }
        }
        std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, double>>> by_net;
        for (const auto& [addr, a] : src_anomaly) {
            if (a < kSuspicionThreshold) continue;
            if (state.ingress_denied(addr, PortRange::all())) continue;
            by_net[addr & 0xffffff00u].push_back({addr, a});
        }
        for (const auto& [net, members] : by_net) {
            if (members.size() >= 2) {
                double m = 0.0;
                for (const auto& [addr, a] : members) m = std::max(m, a);
                const Cidr c(net, 24);
                sources.push_back({"src/" + c.str(), m, action::BlockSource{c}});
            } else {
                const auto c = Cidr::host(members.front().first);
                sources.push_back({"src/" + c.str(), members.front().second, action::BlockSource{c}});
            }
        }
        finish(rules);
        finish(sources);
        auto& out = t.of(ActionType::BlockTraffic);
        out = rules;
        for (auto& s : sources) {
            if (out.size() < static_cast<std::size_t>(kSlotCount)) out.push_back(std::move(s));
        }
    }

    // RestrictUser.
    {
        auto& out = t.of(ActionType::RestrictUser);
        for (const auto& p : view.principals) {
            if (p.restricted || p.anomaly_score < kSuspicionThreshold) continue;
            out.push_back({"principal/" + p.id, p.anomaly_score, action::RestrictPrincipal{p.id}});
        }
        finish(out);
    }

    // OpenPort: newest agent deny first.
    {
        auto& out = t.of(ActionType::OpenPort);
        for (auto it = state.rules.rbegin(); it != state.rules.rend(); ++it) {
            if (it->origin != RuleOrigin::Agent || it->verb != Verb::Deny) continue;
            out.push_back({"rule/" + std::to_string(it->id), 0.0, action::OpenPort{it->id}});
            if (out.size() == static_cast<std::size_t>(kSlotCount)) break;
        }
    }

    // IsolateInstance.
    {
        auto& out = t.of(ActionType::IsolateInstance);
        for (const auto& i : view.instances) {
            if (i.isolated) continue;
            auto it = dst_anomaly.find(i.id);
            if (it == dst_anomaly.end() || it->second < kSuspicionThreshold) continue;
            out.push_back({"instance/" + i.id, it->second, action::IsolateInstance{i.id}});
        }
        finish(out);
    }

    // IncreaseMonitoring: compliance gaps first, then lowest level among suspicious targets.
    {
        std::vector<Candidate> gaps, levels;
        for (const auto& [zone, on] : state.flow_logging) {
            if (!on) gaps.push_back({std::string("zone/") + to_string(zone), 1.0, action::EnableFlowLogging{zone}});
        }
        for (const auto& [id, inst] : state.instances) {
            if (inst.tier == Tier::Web && inst.monitoring < 1) {
                gaps.push_back({"instance/" + id, 1.0, action::RaiseMonitoring{id}});
            }
        }
        for (const auto& [id, inst] : state.instances) {
            if (inst.isolated || inst.monitoring >= kMaxMonitoringLevel) continue;
            if (inst.tier == Tier::Web && inst.monitoring < 1) continue;  // already a gap
            auto it = dst_anomaly.find(id);
            if (it == dst_anomaly.end() || it->second < kSuspicionThreshold) continue;
            // Lower level ranks first; anomaly only as a tie-break.
            const double score = static_cast<double>(kMaxMonitoringLevel - inst.monitoring) / kMaxMonitoringLevel * 0.5 +
                                 0.5 * it->second;
            levels.push_back({"instance/" + id, std::min(score, 0.99), action::RaiseMonitoring{id}});
        }
        std::stable_sort(levels.begin(), levels.end(), [&](const Candidate& a, const Candidate& b) {
            const auto& ia = state.instances.at(a.label.substr(9));
            const auto& ib = state.instances.at(b.label.substr(9));
            if (ia.monitoring != ib.monitoring) return ia.monitoring < ib.monitoring;
            if (a.score != b.score) return a.score > b.score;
            return a.label < b.label;
        });
        std::stable_sort(gaps.begin(), gaps.end(), [](const Candidate& a, const Candidate& b) { return a.label < b.label; });
        auto& out = t.of(ActionType::IncreaseMonitoring);
        out = gaps;
        for (auto& c : levels) {
            if (out.size() < static_cast<std::size_t>(kSlotCount)) out.push_back(std::move(c));
        }
        if (out.size() > static_cast<std::size_t>(kSlotCount)) out.resize(kSlotCount);
    }
    return t;
}

}  // namespace secpol
