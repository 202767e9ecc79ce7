#pragma once

#include <optional>
#include <string>
#include <variant>

#include "secpol/policy/config.hpp"

namespace secpol {

enum class GuardrailId { G1, G2, G3, G4 };
const char* to_string(GuardrailId g);

struct GuardrailViolation {
    GuardrailId id;
    std::string detail;
};

/// G1: at least one rule exists and some Allow path still reaches the web tier.
/// G2: flow logging stays on in at least one zone.
/// G3: at least one unrestricted Admin remains.
/// G4: no tier has every instance isolated.
/// A guardrail blocks an action only when it held before and fails after.
struct GuardrailSet {
    bool enabled = true;
};

bool web_tier_reachable(const PolicyState& s);
bool guardrail_holds(GuardrailId g, const PolicyState& s);

std::optional<GuardrailViolation> check_guardrails(const SecurityConfig& config,
                                                   const ConcreteAction& a,
                                                   const GuardrailSet& guardrails = {});

struct ApplyResult {
    std::optional<PolicyChange> change;
    std::optional<GuardrailViolation> violation;
    bool ok() const { return !violation.has_value(); }
};

/// Validates and applies a change. On success the version increases by one and
/// the change is logged; NoOp is the identity and logs nothing. Drift and
/// Baseline actors bypass guardrails. Throws PolicyError(TargetNotFound).
ApplyResult apply_action(SecurityConfig& config, const ConcreteAction& a,
                         const GuardrailSet& guardrails, int step = 0,
                         Actor actor = Actor::Agent);

/// Forward change restoring the state of `target_version`.
PolicyChange rollback(SecurityConfig& config, int target_version, int step = 0);

}  // namespace secpol
