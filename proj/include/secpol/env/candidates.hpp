#pragma once

#include <deque>
#include <string>
#include <vector>

#include "secpol/env/actions.hpp"
#include "secpol/policy/config.hpp"
#include "secpol/world/events.hpp"
#include "secpol/world/world.hpp"

namespace secpol {

/// Anomaly at or above which a source, principal or destination counts as suspicious.
inline constexpr double kSuspicionThreshold = 0.4;

/// Agent-visible projection of the world: no ground-truth flags.
struct InstanceView {
    std::string id;
    Tier tier = Tier::Web;
    Zone zone = Zone::Public;
    bool isolated = false;
    int monitoring_level = 1;
    bool operator==(const InstanceView&) const = default;
};

struct PrincipalView {
    std::string id;
    Privilege privilege = Privilege::ReadOnly;
    bool restricted = false;
    double anomaly_score = 0.0;
    bool operator==(const PrincipalView&) const = default;
};

struct WorldView {
    int step = 0;
    std::vector<InstanceView> instances;
    std::vector<PrincipalView> principals;
    bool operator==(const WorldView&) const = default;
};

WorldView view_of(const World& world);

/// The last W steps of observed events.
class EventWindow {
public:
    explicit EventWindow(int width = 12);

    void clear() { steps_.clear(); }
    void push(int step, std::vector<ObservedEvent> events);
    int width() const { return width_; }

    template <typename F>
    void for_each(F&& f) const {
        for (const auto& s : steps_) {
            for (const auto& e : s.events) f(e);
        }
    }
    /// Events of the most recent pushed step (empty before the first push).
    const std::vector<ObservedEvent>& latest() const;
    std::size_t size() const;

private:
    struct StepEvents {
        int step;
        std::vector<ObservedEvent> events;
    };
    int width_;
    std::deque<StepEvents> steps_;
};

/// An event is live while the configuration has not yet contained it: its
/// source is not denied, its destination not isolated, its principal not
/// restricted, and the change it reports has not been undone.
bool event_live(const ObservedEvent& e, const PolicyState& s);

/// Per-type ranked targets (at most four each), descending score, ties by label.
///   BlockTraffic        C1-violating Allow rules (revoked), then suspicious
///                       sources; two or more suspicious sources in one /24
///                       are offered as the /24
///   RestrictUser        unrestricted principals with anomaly >= 0.4
///   OpenPort            agent-added Deny rules, newest first
///   IsolateInstance     instances receiving live anomalous traffic
///   IncreaseMonitoring  zones without flow logging, web instances below
///                       level 1, then targets of anomalous traffic by level
SlotTables rank_candidates(const EventWindow& window, const PolicyState& state, const WorldView& view);

}  // namespace secpol
