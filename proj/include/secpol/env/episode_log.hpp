#pragma once

#include <ostream>
#include <string>

#include "secpol/env/env.hpp"

namespace secpol {

/// One JSON object per step:
/// {step, state, action, reward, breakdown, incidents, violations, config_version}
std::string episode_log_line(int step, const Transition& t);

class EpisodeLogWriter {
public:
    explicit EpisodeLogWriter(std::ostream& out) : out_(out) {}
    void write(int step, const Transition& t) { out_ << episode_log_line(step, t) << '\n'; }

private:
    std::ostream& out_;
};

}  // namespace secpol
