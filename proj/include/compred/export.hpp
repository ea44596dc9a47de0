#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "compred/pipeline.hpp"

namespace compred {

inline constexpr const char* kMetricsHeader = "subject_id,profile,horizon_ms,ae_m,me_m,ada,mda";

/// Writes the tables (metrics, fits, levels, comparisons, skips, notes) as CSV
/// and/or the whole bundle as bundle.json. Returns the files written.
std::vector<std::filesystem::path> export_results(const ResultBundle& bundle, const std::filesystem::path& out_dir,
                                                  OutputFormat format);

std::string bundle_to_json(const ResultBundle& bundle);
/// Throws SchemaError on malformed input.
ResultBundle bundle_from_json(std::string_view text);
ResultBundle load_bundle(const std::filesystem::path& path);

std::string metrics_csv(const std::vector<MetricSummary>& rows);
std::vector<MetricSummary> read_metrics_csv(const std::filesystem::path& path);

/// Per-horizon outcomes of a sweep: one row per trial, profile, T and start.
void write_horizons_csv(const std::filesystem::path& path, const RunConfig& config, const SweepSet& sweeps);

/// Plot data: fitted curve of the selected degree on a 5 ms grid next to the
/// per-level means and intervals (curves.csv), one file per bundle.
std::filesystem::path export_report(const ResultBundle& bundle, const std::filesystem::path& out_dir,
                                    double step_ms = 5.0);

} // namespace compred
