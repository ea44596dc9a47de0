#include "compred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "compred/errors.hpp"

namespace compred {

namespace {

// Horizon-level means stay in start order; repeats and activities can be
// permuted by the caller, so those levels go through order_invariant_mean.
double mean_in_order(std::span<const double> values)
{
    double sum = 0.0;
    double lo = values.front();
    double hi = values.front();
    for (double v : values) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return std::clamp(sum / static_cast<double>(values.size()), lo, hi);
}

template <typename HorizonValue>
double hierarchical_mean(std::span<const ActivityOutcomes> activities, bool skip_static, HorizonValue value,
                         const char* metric)
{
    std::vector<double> activity_means;
    for (const ActivityOutcomes& a : activities) {
        if (skip_static && a.is_static) {
            continue;
        }
        if (a.repeats.empty()) {
            throw AggregationError(std::string(metric) + ": activity '" + a.activity_id + "' has no repeats");
        }
        std::vector<double> repeat_means;
        for (const RepeatOutcomes& r : a.repeats) {
            if (r.horizons.empty()) {
                throw AggregationError(std::string(metric) + ": activity '" + a.activity_id + "' repeat " +
                                       std::to_string(r.repeat_index) + " has no horizons");
            }
            std::vector<double> hv(r.horizons.size());
            std::transform(r.horizons.begin(), r.horizons.end(), hv.begin(), value);
            repeat_means.push_back(mean_in_order(hv));
        }
        activity_means.push_back(order_invariant_mean(std::move(repeat_means)));
    }
    if (activity_means.empty()) {
        throw AggregationError(std::string(metric) + (skip_static ? ": no non-static activities" : ": no activities"));
    }
    return order_invariant_mean(std::move(activity_means));
}

template <typename HorizonValue>
double pooled_mean(std::span<const ActivityOutcomes> activities, bool skip_static, HorizonValue value,
                   const char* metric)
{
    std::vector<double> all;
    for (const ActivityOutcomes& a : activities) {
        if (skip_static && a.is_static) {
            continue;
        }
        for (const RepeatOutcomes& r : a.repeats) {
            for (const HorizonOutcome& h : r.horizons) {
                all.push_back(value(h));
            }
        }
    }
    if (all.empty()) {
        throw AggregationError(std::string(metric) + (skip_static ? ": no non-static horizons" : ": no horizons"));
    }
    return order_invariant_mean(std::move(all));
}

} // namespace

double order_invariant_mean(std::vector<double> values)
{
    if (values.empty()) {
        throw AggregationError("mean of an empty set");
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    // Rounding must not push the mean outside [min, max].
    return std::clamp((sum + comp) / static_cast<double>(values.size()), values.front(), values.back());
}

std::string_view to_string(AggregationMode mode)
{
    return mode == AggregationMode::Pooled ? "pooled" : "hierarchical";
}

AggregationMode parse_aggregation(std::string_view name)
{
    if (name == "hierarchical") {
        return AggregationMode::Hierarchical;
    }
    if (name == "pooled") {
        return AggregationMode::Pooled;
    }
    throw InvalidArgument("unknown aggregation mode '" + std::string(name) + "'");
}

double average_error(std::span<const ActivityOutcomes> activities, AggregationMode mode)
{
    auto value = [](const HorizonOutcome& h) { return h.mean_error; };
    return mode == AggregationMode::Pooled ? pooled_mean(activities, false, value, "AE")
                                           : hierarchical_mean(activities, false, value, "AE");
}

double max_error(std::span<const ActivityOutcomes> activities)
{
    if (activities.empty()) {
        throw AggregationError("ME: no activities");
    }
    double best = 0.0;
    for (const ActivityOutcomes& a : activities) {
        if (a.repeats.empty()) {
            throw AggregationError("ME: activity '" + a.activity_id + "' has no repeats");
        }
        for (const RepeatOutcomes& r : a.repeats) {
            if (r.horizons.empty()) {
                throw AggregationError("ME: activity '" + a.activity_id + "' repeat " +
                                       std::to_string(r.repeat_index) + " has no horizons");
            }
            for (const HorizonOutcome& h : r.horizons) {
                best = std::max(best, h.max_error);
            }
        }
    }
    return best;
}

double average_direction_accuracy(std::span<const ActivityOutcomes> activities, AggregationMode mode)
{
    auto value = [](const HorizonOutcome& h) { return static_cast<double>(h.score); };
    return mode == AggregationMode::Pooled ? pooled_mean(activities, true, value, "ADA")
                                           : hierarchical_mean(activities, true, value, "ADA");
}

double min_direction_accuracy(std::span<const ActivityOutcomes> activities)
{
    double worst = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const ActivityOutcomes& a : activities) {
        if (a.is_static) {
            continue;
        }
        if (a.repeats.empty()) {
            throw AggregationError("MDA: activity '" + a.activity_id + "' has no repeats");
        }
        for (const RepeatOutcomes& r : a.repeats) {
            if (r.horizons.empty()) {
                throw AggregationError("MDA: activity '" + a.activity_id + "' repeat " +
                                       std::to_string(r.repeat_index) + " has no horizons");
            }
            std::vector<double> scores(r.horizons.size());
            std::transform(r.horizons.begin(), r.horizons.end(), scores.begin(),
                           [](const HorizonOutcome& h) { return static_cast<double>(h.score); });
            worst = std::min(worst, mean_in_order(scores));
            any = true;
        }
    }
    if (!any) {
        throw AggregationError("MDA: no non-static activities");
    }
    return worst;
}

std::vector<SubjectOutcomes> group_outcomes(std::span<const Trial> trials,
                                            std::span<const std::vector<HorizonOutcome>> per_trial)
{
    if (trials.size() != per_trial.size()) {
        throw InvalidArgument("group_outcomes: one outcome list per trial is required");
    }
    std::vector<SubjectOutcomes> subjects;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const Trial& t = trials[i];
        auto subject = std::find_if(subjects.begin(), subjects.end(),
                                    [&](const SubjectOutcomes& s) { return s.subject_id == t.subject_id; });
        if (subject == subjects.end()) {
            subjects.push_back({t.subject_id, {}});
            subject = std::prev(subjects.end());
        }
        auto activity = std::find_if(subject->activities.begin(), subject->activities.end(),
                                     [&](const ActivityOutcomes& a) { return a.activity_id == t.activity_id; });
        if (activity == subject->activities.end()) {
            subject->activities.push_back({t.activity_id, t.is_static, {}});
            activity = std::prev(subject->activities.end());
        } else if (activity->is_static != t.is_static) {
            throw InvalidArgument("activity '" + t.activity_id + "' of subject " + t.subject_id +
                                  " is marked static in some repeats only");
        }
        activity->repeats.push_back({t.repeat_index, per_trial[i]});
    }
    return subjects;
}

MetricSummary summarize_subject(const std::string& subject_id, ProfileKind profile, double horizon_ms,
                                std::span<const ActivityOutcomes> activities, AggregationMode mode)
{
    MetricSummary s;
    s.subject_id = subject_id;
    s.profile = profile;
    s.horizon_ms = horizon_ms;
    s.ae = average_error(activities, mode);
    s.me = max_error(activities);
    const bool has_dynamic = std::any_of(activities.begin(), activities.end(),
                                         [](const ActivityOutcomes& a) { return !a.is_static; });
    if (has_dynamic) {
        s.ada = average_direction_accuracy(activities, mode);
        s.mda = min_direction_accuracy(activities);
    }
    return s;
}

} // namespace compred
