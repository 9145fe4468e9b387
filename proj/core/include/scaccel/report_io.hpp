#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scaccel/driver.hpp"

namespace scaccel {

inline constexpr int kReportSchemaVersion = 1;

/// JSON report (schema documented in the README). Solutions are not
/// serialized; everything the compare/check-bounds commands need is.
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

/// Aligned-column per-level table: level, points, error, k_zero, k_acc,
/// savings_pct, cost_savings_pct. Iteration totals are cumulative through
/// each level. Deterministic for a fixed config and seed.
void write_table_csv(std::ostream& out, const ExperimentReport& report);

/// Auxiliary per-level wall-clock table (cumulative seconds per mode plus
/// percent savings); not deterministic across runs.
void write_timing_csv(std::ostream& out, const ExperimentReport& report);

struct CompareSeries {
    std::string label;
    std::vector<double> mean_iterations;     // per level
    std::vector<long long> cumulative_iters; // per level
};

/// Per-level mean-iteration series plus cumulative iteration savings of every
/// series against the first one (the baseline).
void write_compare_csv(std::ostream& out, const std::vector<CompareSeries>& series);

} // namespace scaccel
