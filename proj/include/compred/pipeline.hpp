#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compred/config.hpp"
#include "compred/metrics.hpp"
#include "compred/prediction.hpp"
#include "compred/trial_io.hpp"

namespace compred {

inline constexpr const char* kVersion = "compred 1.0.0";

struct SkipRecord {
    std::string subject_id;
    std::string activity_id;
    int repeat_index = 0;
    std::string reason;

    friend bool operator==(const SkipRecord&, const SkipRecord&) = default;
};

/// One polynomial fit of a metric against T for one profile.
struct FitRow {
    std::string metric;
    ProfileKind profile = ProfileKind::Zero;
    int degree = 1;
    bool selected = false;
    std::vector<double> coefficients;  // per ms^j, lowest order first
    double r_squared = 0.0;
    /// p of the F-test that adds this degree to the one below it.
    std::optional<double> f_p_value;
    bool weight_fallback = false;
    bool degenerate = false;

    friend bool operator==(const FitRow&, const FitRow&) = default;
};

/// Across-subject mean of one metric at one T with its confidence interval.
struct LevelRow {
    std::string metric;
    ProfileKind profile = ProfileKind::Zero;
    double horizon_ms = 0.0;
    std::size_t n = 0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    friend bool operator==(const LevelRow&, const LevelRow&) = default;
};

/// Either the omnibus test across profiles ("anova") or one pairwise test
/// ("zero-const", ...).
struct ComparisonRow {
    std::string metric;
    double horizon_ms = 0.0;
    std::string comparison;
    double statistic = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p_value = 1.0;
    std::optional<double> adjusted_p;
    std::optional<double> cohens_d;
    std::string effect;
    std::string note;

    friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ResultBundle {
    std::string version = kVersion;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<MetricSummary> metrics;
    std::vector<FitRow> fits;
    std::vector<LevelRow> levels;
    std::vector<ComparisonRow> comparisons;
    std::vector<SkipRecord> skips;
    std::vector<std::string> notes;

    friend bool operator==(const ResultBundle&, const ResultBundle&) = default;
};

struct LoadedTrials {
    std::vector<Trial> trials;
    std::vector<std::string> notes;
};

/// Loads every manifest entry. Input errors propagate; nothing is skipped here.
LoadedTrials load_trials(const RunConfig& config, const Manifest& manifest);

/// Per-horizon outcomes of one trial, indexed [profile][horizon length].
using TrialOutcomes = std::vector<std::vector<std::vector<HorizonOutcome>>>;

struct SweepSet {
    std::vector<Trial> trials;  // trials that were swept
    std::vector<TrialOutcomes> outcomes;
    std::vector<SkipRecord> skips;
};

/// Sweeps every trial for every configured profile and horizon. Trials shorter
/// than the largest horizon are moved to the skip list.
SweepSet sweep_trials(const RunConfig& config, std::vector<Trial> trials);

/// Per (subject, profile, T) summaries, subjects in order of first appearance.
std::vector<MetricSummary> compute_metrics(const RunConfig& config, const SweepSet& sweeps);

/// Fits, per-level intervals and profile comparisons for a metrics table.
void analyze_metrics(const RunConfig& config, ResultBundle& bundle);

ResultBundle run_pipeline(const RunConfig& config, const Manifest& manifest);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

inline constexpr const char* kMetricNames[] = {"ae", "me", "ada", "mda"};

/// Value of a named metric, unset for ada/mda without dynamic activities.
std::optional<double> metric_value(const MetricSummary& row, std::string_view metric);

} // namespace compred
