#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secpol/harness/metrics.hpp"

namespace secpol {

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One row of the comparison table, already formatted.
struct TableRow {
    std::string approach;
    std::string mitigation;
    std::string response;
    std::string tpr;
    std::string fpr;
    std::string updates;
    std::string compliance;
    bool operator==(const TableRow&) const = default;
};

extern const std::vector<std::string> kTableColumns;

TableRow row_from_report(const MetricsReport& m);

std::string render_markdown(const std::vector<TableRow>& rows);
std::string render_csv(const std::vector<TableRow>& rows);

/// Minimal CSV reader (double-quoted fields may contain commas and "").
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& m);
std::string metrics_csv(const MetricsReport& m);
MetricsReport parse_metrics_csv(std::istream& in);

/// Reads either a metrics CSV (one report) or a table CSV with the comparison
/// columns (one row per line). Throws ReportError.
std::vector<TableRow> load_rows(const std::filesystem::path& path);

}  // namespace secpol
