#include "secpol/world/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace secpol {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<SecurityEvent> parse_trace(std::istream& in, bool allow_truth) {
    std::vector<SecurityEvent> events;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    bool has_truth = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        auto cols = split(line, ',');
        for (auto& c : cols) c = trim(c);
        if (!header_seen) {
            header_seen = true;
            if (cols.size() >= 5 && cols[0] == "step" && cols[1] == "kind") {
                has_truth = cols.size() == 6 && cols[5] == "truth";
                if (cols.size() > 6 || (cols.size() == 6 && !has_truth)) throw TraceError(lineno, "bad header");
                if (has_truth && !allow_truth) throw TraceError(lineno, "truth column not permitted here");
                continue;
            }
            throw TraceError(lineno, "missing header 'step,kind,source,attrs,anomaly'");
        }
        const std::size_t want = has_truth ? 6 : 5;
        if (cols.size() != want) {
            throw TraceError(lineno, "expected " + std::to_string(want) + " columns, got " + std::to_string(cols.size()));
        }
        SecurityEvent e;
        e.origin = EventOrigin::Replay;
        {
            const auto& c = cols[0];
            auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), e.step);
            if (ec != std::errc() || p != c.data() + c.size() || e.step < 0) {
                throw TraceError(lineno, "invalid step '" + c + "'");
            }
        }
        auto kind = parse_event_kind(cols[1]);
        if (!kind) throw TraceError(lineno, "unknown event kind '" + cols[1] + "'");
        e.kind = *kind;
        if (cols[2].empty()) throw TraceError(lineno, "empty source");
        e.source = cols[2];
        if (!cols[3].empty()) {
            for (const auto& kv : split(cols[3], ';')) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0) throw TraceError(lineno, "bad attribute '" + kv + "'");
                e.attrs[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
        }
        try {
            std::size_t used = 0;
            e.anomaly = std::stod(cols[4], &used);
            if (used != cols[4].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw TraceError(lineno, "invalid anomaly '" + cols[4] + "'");
        }
        if (!(e.anomaly >= 0.0 && e.anomaly <= 1.0)) throw TraceError(lineno, "anomaly outside [0, 1]");
        if (has_truth) {
            if (cols[5] == "1" || cols[5] == "true") {
                e.truth_malicious = true;
            } else if (cols[5] != "0" && cols[5] != "false") {
                throw TraceError(lineno, "invalid truth '" + cols[5] + "'");
            }
        }
        if (!events.empty() && e.step < events.back().step) throw TraceError(lineno, "step decreases");
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<SecurityEvent> load_trace(const std::filesystem::path& path, bool allow_truth) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file " + path.string());
    return parse_trace(in, allow_truth);
}

}  // namespace secpol
