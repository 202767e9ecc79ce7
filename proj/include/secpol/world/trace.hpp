#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secpol/world/events.hpp"

namespace secpol {

class TraceError : public std::runtime_error {
public:
    TraceError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Parses a replay trace:
///
///     step,kind,source,attrs,anomaly[,truth]
///     3,NetFlow,45.1.2.3,dst_port=22;signature=scan,0.8
///
/// attrs is a `;`-separated list of key=value pairs (may be empty). The truth
/// column is accepted only when `allow_truth` is set (test fixtures); otherwise
/// replayed events are treated as benign. Steps must be non-decreasing. An empty
/// input or a header-only input yields no events.
std::vector<SecurityEvent> parse_trace(std::istream& in, bool allow_truth = false);
std::vector<SecurityEvent> load_trace(const std::filesystem::path& path, bool allow_truth = false);

}  // namespace secpol
