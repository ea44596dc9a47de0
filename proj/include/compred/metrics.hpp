#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compred/prediction.hpp"
#include "compred/profiles.hpp"

namespace compred {

struct RepeatOutcomes {
    int repeat_index = 0;
    std::vector<HorizonOutcome> horizons;
};

struct ActivityOutcomes {
    std::string activity_id;
    bool is_static = false;
    std::vector<RepeatOutcomes> repeats;
};

/// How the expectation at each level is taken.
///  Hierarchical: mean over samples, then horizons, then repeats, then activities.
///  Pooled: one grand mean over every horizon of every repeat and activity.
enum class AggregationMode { Hierarchical, Pooled };

std::string_view to_string(AggregationMode mode);
AggregationMode parse_aggregation(std::string_view name);

double average_error(std::span<const ActivityOutcomes> activities,
                     AggregationMode mode = AggregationMode::Hierarchical);
double max_error(std::span<const ActivityOutcomes> activities);

/// Static activities are skipped; throws AggregationError when nothing remains.
double average_direction_accuracy(std::span<const ActivityOutcomes> activities,
                                  AggregationMode mode = AggregationMode::Hierarchical);
double min_direction_accuracy(std::span<const ActivityOutcomes> activities);

struct MetricSummary {
    std::string subject_id;
    ProfileKind profile = ProfileKind::Zero;
    double horizon_ms = 0.0;
    double ae = 0.0;  // m
    double me = 0.0;  // m
    /// Unset when the subject has no non-static activity.
    std::optional<double> ada;
    std::optional<double> mda;

    friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

MetricSummary summarize_subject(const std::string& subject_id, ProfileKind profile, double horizon_ms,
                                std::span<const ActivityOutcomes> activities,
                                AggregationMode mode = AggregationMode::Hierarchical);

struct SubjectOutcomes {
    std::string subject_id;
    std::vector<ActivityOutcomes> activities;
};

/// Groups per-trial sweep outcomes into subject -> activity -> repeat, keeping
/// the order in which subjects and activities first appear.
std::vector<SubjectOutcomes> group_outcomes(std::span<const Trial> trials,
                                            std::span<const std::vector<HorizonOutcome>> per_trial);

/// Mean that does not depend on the order of `values`: they are sorted before
/// a compensated sum.
double order_invariant_mean(std::vector<double> values);

} // namespace compred
