#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace secpol {

enum class EventKind { NetFlow, ApiCall, Alert, ConfigChange };
enum class Signature { None, Scan, Flood, Sqli, Xss, Privesc };
enum class EventOrigin { Sim, Replay };

const char* to_string(EventKind k);
const char* to_string(Signature s);
std::optional<EventKind> parse_event_kind(std::string_view s);
std::optional<Signature> parse_signature(std::string_view s);

using EventAttrs = std::map<std::string, std::string>;

/// One element of the simulated telemetry stream. `truth_malicious` is ground
/// truth for scoring and never crosses into the feature layer.
struct SecurityEvent {
    int step = 0;
    EventKind kind = EventKind::NetFlow;
    std::string source;
    EventAttrs attrs;
    double anomaly = 0.0;
    bool truth_malicious = false;
    EventOrigin origin = EventOrigin::Sim;

    bool operator==(const SecurityEvent&) const = default;
};

/// Agent-visible projection of SecurityEvent: same data minus ground truth.
struct ObservedEvent {
    int step = 0;
    EventKind kind = EventKind::NetFlow;
    std::string source;
    EventAttrs attrs;
    double anomaly = 0.0;
    EventOrigin origin = EventOrigin::Sim;

    Signature signature() const;
    int dst_port() const;         // -1 when absent
    std::string attr(const std::string& key) const;

    bool operator==(const ObservedEvent&) const = default;
};

ObservedEvent observe(const SecurityEvent& e);

}  // namespace secpol
