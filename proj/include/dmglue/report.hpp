#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dmglue {

struct ReportPoint {
    double param = 0.0;
    double value = 0.0;
};

struct ReportMeta {
    std::uint64_t seed = 0;
    std::string grid;
    double p = 0.0;
    double delta = 0.0;
    std::string version = "1";
    std::string note;
};

// Result of a convergence study: measured values against a parameter ladder
// plus the fitted log-log slope.  `pass` compares slope against
// expected_slope within `tolerance`; `one_sided` relaxes that to
// slope <= expected_slope + tolerance (decay envelopes).
struct ConvergenceReport {
    std::string quantity;
    std::vector<ReportPoint> points;
    double slope = 0.0;
    double expected_slope = 0.0;
    double tolerance = 0.0;
    double residual = 0.0;
    bool one_sided = false;
    bool pass = false;
    ReportMeta meta;
};

bool operator==(const ReportPoint& a, const ReportPoint& b);
bool operator==(const ReportMeta& a, const ReportMeta& b);
bool operator==(const ConvergenceReport& a, const ConvergenceReport& b);

enum class ReportFormat { json, csv };

// Serialization round-trips bit exactly: doubles are written with 17
// significant digits, enough to pin down every IEEE value, and both formats
// carry the same field set.  A report with no points is malformed and emit
// refuses it (ReportError).
std::string emit_report(const ConvergenceReport& report, ReportFormat format);
ConvergenceReport parse_report(const std::string& text, ReportFormat format);

// Writes emit_report output to `path`, creating parent directories.  Throws
// IoError when the file cannot be written.
void write_report(const ConvergenceReport& report, const std::string& path,
                  ReportFormat format);
ConvergenceReport read_report(const std::string& path, ReportFormat format);

}  // namespace dmglue
