#pragma once

#include <array>
#include <optional>

#include "secpol/env/actions.hpp"
#include "secpol/env/candidates.hpp"
#include "secpol/policy/config.hpp"

namespace secpol {

inline constexpr int kFeatureCount = 32;
using StateVector = std::array<double, kFeatureCount>;

/// Index map of the state vector.
namespace feat {
inline constexpr int kRuleCount = 0;         // rules / 32
inline constexpr int kAgentDenyFraction = 1;
inline constexpr int kWorldOpenRules = 2;    // ingress Allow from 0.0.0.0/0, / 8
inline constexpr int kAlertCount = 3;        // live alerts in window, capped at 20
inline constexpr int kMaxAnomaly = 4;        // max live anomaly in window
inline constexpr int kSigScan = 5;
inline constexpr int kSigFlood = 6;
inline constexpr int kSigWeb = 7;            // sqli or xss
inline constexpr int kSigPrivesc = 8;
inline constexpr int kAnomalousPrincipals = 9;  // / 4
inline constexpr int kViolationCount = 10;      // / 4
inline constexpr int kC1 = 11;                  // C1..C4 at 11..14
inline constexpr int kIsolatedFraction = 15;
inline constexpr int kMonitoringCoverage = 16;  // mean level / 2
inline constexpr int kResourceIndex = 17;       // monitoring units / 8
inline constexpr int kActiveIncident = 18;      // live alert in the latest step
inline constexpr int kLastAction = 19;          // one-hot NoOp + 5 types at 19..24
inline constexpr int kSinceChange = 25;         // steps since last change / episode_len
inline constexpr int kSlotOccupancy = 26;       // per type / 4 at 26..30
inline constexpr int kProgress = 31;
}  // namespace feat

inline constexpr int kAlertCap = 20;
inline constexpr int kWorldOpenCap = 8;
inline constexpr int kResourceCap = 8;
inline constexpr double kRuleScale = 32.0;

struct FeatureContext {
    int step = 0;
    int episode_len = 720;
    std::optional<ActionType> last_action;  // nullopt means NoOp (or none yet)
    int last_change_step = 0;
};

/// Pure function of agent-visible data; every entry lies in [0, 1].
StateVector extract_features(const EventWindow& window, const PolicyState& state, const WorldView& view,
                             const SlotTables& tables, const FeatureContext& ctx);

}  // namespace secpol
