#include "secpol/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace secpol {

const std::vector<std::string> kTableColumns{"Approach",           "Threat Mitigation",   "Incident Response Time",
                                             "True Positive Rate", "False Positive Rate", "Avg. Daily Policy Updates",
                                             "Compliance Issues"};

namespace {

const std::vector<std::string> kMetricsHeader{
    "name", "episodes", "seeds", "mitigation_rate", "tpr", "fpr", "response_median_s", "response_p90_s",
    "policy_updates_per_hour", "policy_updates_per_day", "outstanding_compliance", "overhead_index", "neutralized",
    "breached"};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string pct(const std::optional<double>& v) { return v ? fmt("%.2f%%", *v * 100.0) : "n/a"; }

std::string num(const std::optional<double>& v) { return v ? fmt("%.10g", *v) : "n/a"; }

std::optional<double> parse_opt(const std::string& s, const std::string& field) {
    if (s == "n/a" || s.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ReportError("field " + field + ": not a number: '" + s + "'");
    }
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> cells(const TableRow& r) {
    return {r.approach, r.mitigation, r.response, r.tpr, r.fpr, r.updates, r.compliance};
}

}  // namespace

TableRow row_from_report(const MetricsReport& m) {
    TableRow r;
    r.approach = m.name;
    r.mitigation = pct(m.mitigation_rate);
    if (m.response_median_s) {
        r.response = fmt("%.0f", *m.response_median_s) + "–" + fmt("%.0f", m.response_p90_s.value_or(*m.response_median_s)) +
                     " sec";
    } else {
        r.response = "n/a";
    }
    r.tpr = pct(m.tpr);
    r.fpr = pct(m.fpr);
    r.updates = m.policy_updates_per_day ? fmt("%.1f", *m.policy_updates_per_day) : "n/a";
    if (!m.outstanding_compliance) {
        r.compliance = "n/a";
    } else if (*m.outstanding_compliance == 0.0) {
        r.compliance = "0";
    } else {
        r.compliance = fmt("%.2f outstanding", *m.outstanding_compliance);
    }
    return r;
}

std::string render_markdown(const std::vector<TableRow>& rows) {
    std::ostringstream out;
    out << '|';
    for (const auto& c : kTableColumns) out << ' ' << c << " |";
    out << "\n|";
    for (std::size_t i = 0; i < kTableColumns.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& r : rows) {
        out << '|';
        for (const auto& c : cells(r)) out << ' ' << c << " |";
        out << '\n';
    }
    return out.str();
}

std::string render_csv(const std::vector<TableRow>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kTableColumns.size(); ++i) out << (i ? "," : "") << csv_cell(kTableColumns[i]);
    out << '\n';
    for (const auto& r : rows) {
        const auto cs = cells(r);
        for (std::size_t i = 0; i < cs.size(); ++i) out << (i ? "," : "") << csv_cell(cs[i]);
        out << '\n';
    }
    return out.str();
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false, any = false;
    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell += '"';
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n') {
            if (any || !cell.empty()) {
                row.push_back(std::move(cell));
                rows.push_back(std::move(row));
            }
            row.clear();
            cell.clear();
            any = false;
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (quoted) throw ReportError("unterminated quoted field");
    if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string metrics_csv(const MetricsReport& m) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kMetricsHeader.size(); ++i) out << (i ? "," : "") << kMetricsHeader[i];
    out << '\n';
    out << csv_cell(m.name) << ',' << m.episodes << ',' << m.seeds << ',' << num(m.mitigation_rate) << ','
        << num(m.tpr) << ',' << num(m.fpr) << ',' << num(m.response_median_s) << ',' << num(m.response_p90_s) << ','
        << num(m.policy_updates_per_hour) << ',' << num(m.policy_updates_per_day) << ','
        << num(m.outstanding_compliance) << ',' << num(m.overhead_index) << ',' << m.neutralized << ','
        << m.breached << '\n';
    return out.str();
}

void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& m) {
    std::ofstream out(path);
    if (!out) throw ReportError("cannot write " + path.string());
    out << metrics_csv(m);
}

MetricsReport parse_metrics_csv(std::istream& in) {
    const auto rows = parse_csv(in);
    if (rows.size() != 2 || rows[0] != kMetricsHeader || rows[1].size() != kMetricsHeader.size()) {
        throw ReportError("not a metrics file (expected header and one row)");
    }
    const auto& v = rows[1];
    MetricsReport m;
    m.name = v[0];
    try {
        m.episodes = std::stoi(v[1]);
        m.seeds = std::stoi(v[2]);
        m.neutralized = std::stoi(v[12]);
        m.breached = std::stoi(v[13]);
    } catch (const std::exception&) {
        throw ReportError("bad integer field in metrics file");
    }
    m.mitigation_rate = parse_opt(v[3], kMetricsHeader[3]);
    m.tpr = parse_opt(v[4], kMetricsHeader[4]);
    m.fpr = parse_opt(v[5], kMetricsHeader[5]);
    m.response_median_s = parse_opt(v[6], kMetricsHeader[6]);
    m.response_p90_s = parse_opt(v[7], kMetricsHeader[7]);
    m.policy_updates_per_hour = parse_opt(v[8], kMetricsHeader[8]);
    m.policy_updates_per_day = parse_opt(v[9], kMetricsHeader[9]);
    m.outstanding_compliance = parse_opt(v[10], kMetricsHeader[10]);
    m.overhead_index = parse_opt(v[11], kMetricsHeader[11]);
    return m;
}

std::vector<TableRow> load_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ReportError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto text = buf.str();
    std::istringstream first(text);
    const auto rows = parse_csv(first);
    if (rows.empty()) throw ReportError(path.string() + ": empty file");
    if (rows[0] == kMetricsHeader) {
        std::istringstream again(text);
        try {
            return {row_from_report(parse_metrics_csv(again))};
        } catch (const ReportError& e) {
            throw ReportError(path.string() + ": " + e.what());
        }
    }
    if (rows[0] != kTableColumns) throw ReportError(path.string() + ": unrecognized header");
    std::vector<TableRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != kTableColumns.size()) {
            throw ReportError(path.string() + ": line " + std::to_string(i + 1) + " has " + std::to_string(r.size()) +
                              " columns");
        }
        out.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6]});
    }
    return out;
}

}  // namespace secpol
