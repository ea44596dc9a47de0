#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "compred/analysis.hpp"
#include "compred/metrics.hpp"
#include "compred/profiles.hpp"
#include "compred/signal.hpp"

namespace compred {

enum class OutputFormat { Csv, Json, Both };

std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view name);

struct StatsOptions {
    double alpha = 0.05;
    /// Bonferroni family sizes: pairs among the non-oracle profiles, and
    /// oracle-vs-other pairs.
    std::size_t bonferroni_m_pairs = 3;
    std::size_t bonferroni_m_oracle = 3;
    CohensDVariant d_variant = CohensDVariant::Pooled;
    double zero_variance_epsilon = 1e-12;
    double ci_level = 0.95;
};

struct RunConfig {
    double dt = 0.005;
    std::vector<double> horizons_ms{kDefaultHorizonsMs.begin(), kDefaultHorizonsMs.end()};
    std::vector<ProfileKind> profiles{kAllProfiles.begin(), kAllProfiles.end()};
    std::size_t stride = 1;
    AggregationMode aggregation = AggregationMode::Hierarchical;
    StatsOptions stats;

    double gravity = kDefaultGravity;
    FilterSpec filter;
    bool filter_enabled = true;
    bool zero_phase = true;
    double com_rate_hz = 200.0;
    double grf_rate_hz = 1000.0;
    double contact_threshold_n = 20.0;
    std::size_t contact_hold_samples = 5;
    std::size_t length_tolerance = 1;
    bool velocity_fallback = true;

    // Execution settings; they never change results and are left out of the echo.
    std::size_t threads = 1;
    std::filesystem::path output_dir = "out";
    OutputFormat format = OutputFormat::Both;
};

/// Sets one key. Throws ConfigError for unknown keys or malformed values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat "key = value" file; '#' starts a comment.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view text);

/// Checks cross-field constraints (every horizon a whole number of samples, ...).
void validate_config(const RunConfig& config);

/// Effective settings that influence results, in a fixed key order.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

} // namespace compred
