#include "secpol/env/episode_log.hpp"

#include "json.hpp"

namespace secpol {

std::string episode_log_line(int step, const Transition& t) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["step"] = step;
    j["state"] = t.s_next;
    j["action"] = t.a;
    j["applied"] = describe(t.info.applied);
    j["reward"] = t.r;
    const auto& b = t.info.breakdown;
    j["breakdown"] = ordered_json{{"mitigation", b.mitigation},
                                  {"incident", b.incident},
                                  {"compliance_fix", b.compliance_fix},
                                  {"compliance_violation", b.compliance_violation},
                                  {"resource", b.resource},
                                  {"change", b.change},
                                  {"stability", b.stability},
                                  {"attack_step", b.attack_step},
                                  {"false_positive", b.false_positive},
                                  {"invalid", b.invalid}};
    auto incidents = ordered_json::array();
    for (const auto& i : t.info.incidents) {
        incidents.push_back(ordered_json{{"step", i.step}, {"scenario", i.scenario_id}, {"outcome", to_string(i.outcome)}});
    }
    j["incidents"] = std::move(incidents);
    auto violations = ordered_json::array();
    for (auto c : t.info.violations) violations.push_back(to_string(c));
    j["violations"] = std::move(violations);
    j["config_version"] = t.info.config_version;
    return j.dump();
}

}  // namespace secpol
