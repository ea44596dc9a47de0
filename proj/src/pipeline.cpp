#include "compred/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "compred/analysis.hpp"
#include "compred/errors.hpp"

namespace compred {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn)
{
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& th : pool) {
        th.join();
    }
    // Report the failure of the lowest index so errors do not depend on scheduling.
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::optional<double> metric_value(const MetricSummary& row, std::string_view metric)
{
    if (metric == "ae") {
        return row.ae;
    }
    if (metric == "me") {
        return row.me;
    }
    if (metric == "ada") {
        return row.ada;
    }
    if (metric == "mda") {
        return row.mda;
    }
    throw InvalidArgument("unknown metric '" + std::string(metric) + "'");
}

LoadedTrials load_trials(const RunConfig& config, const Manifest& manifest)
{
    const std::size_t n = manifest.entries.size();
    std::vector<std::vector<Trial>> per_entry(n);
    std::vector<std::vector<std::string>> notes(n);
    parallel_for(n, config.threads, [&](std::size_t i) {
        per_entry[i] = load_trial(manifest.entries[i], config, &notes[i]);
    });
    LoadedTrials out;
    for (std::size_t i = 0; i < n; ++i) {
        for (Trial& t : per_entry[i]) {
            out.trials.push_back(std::move(t));
        }
        out.notes.insert(out.notes.end(), notes[i].begin(), notes[i].end());
    }
    return out;
}

SweepSet sweep_trials(const RunConfig& config, std::vector<Trial> trials)
{
    std::vector<HorizonSpec> specs;
    std::size_t longest = 0;
    double longest_ms = 0.0;
    for (double t : config.horizons_ms) {
        specs.push_back(make_horizon(t, config.dt));
        if (specs.back().n_samples > longest) {
            longest = specs.back().n_samples;
            longest_ms = t;
        }
    }

    SweepSet out;
    for (Trial& t : trials) {
        if (t.size() < longest) {
            out.skips.push_back({t.subject_id, t.activity_id, t.repeat_index,
                                 "trial has " + std::to_string(t.size()) + " samples, the " + format_double(longest_ms) +
                                     " ms horizon needs " + std::to_string(longest)});
        } else {
            out.trials.push_back(std::move(t));
        }
    }
    out.outcomes.resize(out.trials.size());
    parallel_for(out.trials.size(), config.threads, [&](std::size_t i) {
        TrialOutcomes& o = out.outcomes[i];
        o.resize(config.profiles.size());
        for (std::size_t p = 0; p < config.profiles.size(); ++p) {
            o[p].resize(specs.size());
            for (std::size_t h = 0; h < specs.size(); ++h) {
                o[p][h] = sweep_outcomes(out.trials[i], specs[h], config.profiles[p], config.stride);
            }
        }
    });
    return out;
}

std::vector<MetricSummary> compute_metrics(const RunConfig& config, const SweepSet& sweeps)
{
    const std::size_t n_profiles = config.profiles.size();
    const std::size_t n_horizons = config.horizons_ms.size();
    std::vector<std::string> subjects;
    for (const Trial& t : sweeps.trials) {
        if (std::find(subjects.begin(), subjects.end(), t.subject_id) == subjects.end()) {
            subjects.push_back(t.subject_id);
        }
    }
    // [subject][profile][horizon]
    std::vector<std::vector<std::vector<MetricSummary>>> table(
        subjects.size(), std::vector<std::vector<MetricSummary>>(n_profiles, std::vector<MetricSummary>(n_horizons)));

    std::vector<std::vector<HorizonOutcome>> per_trial(sweeps.trials.size());
    for (std::size_t p = 0; p < n_profiles; ++p) {
        for (std::size_t h = 0; h < n_horizons; ++h) {
            for (std::size_t i = 0; i < sweeps.trials.size(); ++i) {
                per_trial[i] = sweeps.outcomes[i][p][h];
            }
            const auto grouped = group_outcomes(sweeps.trials, per_trial);
            for (std::size_t s = 0; s < grouped.size(); ++s) {
                table[s][p][h] = summarize_subject(grouped[s].subject_id, config.profiles[p], config.horizons_ms[h],
                                                   grouped[s].activities, config.aggregation);
            }
        }
    }
    std::vector<MetricSummary> rows;
    rows.reserve(subjects.size() * n_profiles * n_horizons);
    for (auto& by_profile : table) {
        for (auto& by_horizon : by_profile) {
            for (auto& row : by_horizon) {
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

namespace {

std::vector<double> values_for(const std::vector<MetricSummary>& rows, std::string_view metric, ProfileKind profile,
                               double horizon_ms)
{
    std::vector<double> out;
    for (const MetricSummary& r : rows) {
        if (r.profile == profile && r.horizon_ms == horizon_ms) {
            if (auto v = metric_value(r, metric)) {
                out.push_back(*v);
            }
        }
    }
    return out;
}

FitRow fit_row(std::string_view metric, ProfileKind profile, const FitResult& fit, int selected,
               std::optional<TestResult> test)
{
    FitRow row;
    row.metric = metric;
    row.profile = profile;
    row.degree = fit.degree;
    row.selected = fit.degree == selected;
    row.coefficients = fit.coefficients;
    row.r_squared = fit.r_squared;
    if (test) {
        row.f_p_value = test->p_value;
    }
    row.weight_fallback = fit.any_weight_fallback();
    row.degenerate = fit.degenerate;
    return row;
}

void fit_metric(const RunConfig& config, std::string_view metric, ProfileKind profile,
                const std::vector<LevelSamples>& levels, ResultBundle& bundle)
{
    const TrendSelection sel = select_trend(levels, config.stats.alpha, config.stats.zero_variance_epsilon);
    std::optional<TestResult> quad_test = sel.quadratic_vs_linear;
    if (!quad_test && sel.quadratic && sel.quadratic->n_total > sel.quadratic->n_params()) {
        quad_test = nested_f_test(*sel.linear, *sel.quadratic);
    }
    bundle.fits.push_back(fit_row(metric, profile, *sel.linear, sel.selected_degree, std::nullopt));
    if (sel.quadratic) {
        bundle.fits.push_back(fit_row(metric, profile, *sel.quadratic, sel.selected_degree, quad_test));
    }
    if (sel.cubic) {
        bundle.fits.push_back(fit_row(metric, profile, *sel.cubic, sel.selected_degree, sel.cubic_vs_quadratic));
    }
}

void compare_profiles(const RunConfig& config, std::string_view metric, double horizon_ms,
                      const std::vector<std::vector<double>>& groups, ResultBundle& bundle)
{
    const auto& profiles = config.profiles;
    ComparisonRow omnibus;
    omnibus.metric = metric;
    omnibus.horizon_ms = horizon_ms;
    omnibus.comparison = "anova";
    bool run_pairs = false;
    try {
        const TestResult r = welch_anova(groups);
        omnibus.statistic = r.statistic;
        omnibus.df1 = r.df1;
        omnibus.df2 = r.df2;
        omnibus.p_value = r.p_value;
        run_pairs = r.p_value < config.stats.alpha;
    } catch (const DegenerateVariance&) {
        omnibus.statistic = std::nan("");
        omnibus.df1 = static_cast<double>(groups.size() - 1);
        omnibus.df2 = std::nan("");
        omnibus.p_value = std::nan("");
        omnibus.note = "zero variance in a group; pairwise tests run regardless";
        run_pairs = true;
    }
    bundle.comparisons.push_back(omnibus);
    if (!run_pairs) {
        return;
    }

    std::vector<ComparisonRow> pairs[2];  // non-oracle, oracle
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        for (std::size_t j = i + 1; j < profiles.size(); ++j) {
            ComparisonRow row;
            row.metric = metric;
            row.horizon_ms = horizon_ms;
            row.comparison = std::string(to_string(profiles[i])) + "-" + std::string(to_string(profiles[j]));
            try {
                const TestResult r = welch_t_test(groups[i], groups[j]);
                row.statistic = r.statistic;
                row.df1 = r.df1;
                row.p_value = r.p_value;
            } catch (const DegenerateVariance&) {
                const bool same = sample_mean(groups[i]) == sample_mean(groups[j]);
                row.statistic = same ? 0.0 : std::copysign(INFINITY, sample_mean(groups[i]) - sample_mean(groups[j]));
                row.df1 = static_cast<double>(groups[i].size() + groups[j].size() - 2);
                row.p_value = same ? 1.0 : 0.0;
                row.note = "both groups constant";
            }
            try {
                row.cohens_d = cohens_d(groups[i], groups[j], config.stats.d_variant);
                row.effect = effect_magnitude(*row.cohens_d);
            } catch (const DegenerateVariance&) {
                row.note += row.note.empty() ? "d undefined" : "; d undefined";
            }
            const bool oracle = profiles[i] == ProfileKind::Oracle || profiles[j] == ProfileKind::Oracle;
            pairs[oracle ? 1 : 0].push_back(std::move(row));
        }
    }
    const std::size_t family_size[2] = {config.stats.bonferroni_m_pairs, config.stats.bonferroni_m_oracle};
    for (int f = 0; f < 2; ++f) {
        std::vector<double> p;
        for (const ComparisonRow& r : pairs[f]) {
            p.push_back(r.p_value);
        }
        const auto adjusted = bonferroni(p, std::max(family_size[f], p.size()));
        for (std::size_t k = 0; k < pairs[f].size(); ++k) {
            pairs[f][k].adjusted_p = adjusted[k];
            bundle.comparisons.push_back(std::move(pairs[f][k]));
        }
    }
}

} // namespace

void analyze_metrics(const RunConfig& config, ResultBundle& bundle)
{
    std::vector<std::string> subjects;
    for (const MetricSummary& r : bundle.metrics) {
        if (std::find(subjects.begin(), subjects.end(), r.subject_id) == subjects.end()) {
            subjects.push_back(r.subject_id);
        }
    }
    const bool inference = subjects.size() >= 2;
    if (!inference) {
        bundle.notes.push_back("insufficient subjects for inference (n = " + std::to_string(subjects.size()) + ")");
    }

    for (const char* metric : kMetricNames) {
        for (ProfileKind profile : config.profiles) {
            std::vector<LevelSamples> levels;
            bool complete = true;
            for (double t : config.horizons_ms) {
                LevelSamples level{t, values_for(bundle.metrics, metric, profile, t)};
                if (level.values.empty()) {
                    complete = false;
                    continue;
                }
                LevelRow row;
                row.metric = metric;
                row.profile = profile;
                row.horizon_ms = t;
                row.n = level.values.size();
                if (row.n >= 2) {
                    const ConfidenceInterval ci = confidence_interval(level.values, config.stats.ci_level);
                    row.mean = ci.mean;
                    row.ci_low = ci.low;
                    row.ci_high = ci.high;
                } else {
                    row.mean = row.ci_low = row.ci_high = level.values.front();
                }
                bundle.levels.push_back(row);
                levels.push_back(std::move(level));
            }
            if (!inference) {
                continue;
            }
            if (!complete || levels.size() < 2) {
                if (!levels.empty()) {
                    bundle.notes.push_back(std::string(metric) + "/" + std::string(to_string(profile)) +
                                           ": too few horizon levels for a trend fit");
                }
                continue;
            }
            try {
                fit_metric(config, metric, profile, levels, bundle);
            } catch (const InvalidArgument& e) {
                bundle.notes.push_back(std::string(metric) + "/" + std::string(to_string(profile)) +
                                       ": no fit (" + e.what() + ")");
            }
        }
    }
    if (!inference || config.profiles.size() < 2) {
        return;
    }
    for (const char* metric : kMetricNames) {
        for (double t : config.horizons_ms) {
            std::vector<std::vector<double>> groups;
            for (ProfileKind profile : config.profiles) {
                groups.push_back(values_for(bundle.metrics, metric, profile, t));
            }
            const bool testable =
                std::all_of(groups.begin(), groups.end(), [](const auto& g) { return g.size() >= 2; });
            if (!testable) {
                if (!groups.front().empty()) {
                    bundle.notes.push_back(std::string(metric) + " at T = " + format_double(t) +
                                           " ms: fewer than two subjects per profile, no comparison");
                }
                continue;
            }
            compare_profiles(config, metric, t, groups, bundle);
        }
    }
}

ResultBundle run_pipeline(const RunConfig& config, const Manifest& manifest)
{
    validate_config(config);
    if (manifest.entries.empty()) {
        throw ManifestError("manifest: no trials");
    }
    LoadedTrials loaded = load_trials(config, manifest);
    SweepSet sweeps = sweep_trials(config, std::move(loaded.trials));
    if (sweeps.trials.empty()) {
        throw AggregationError("no trial is long enough for the longest horizon");
    }
    ResultBundle bundle;
    bundle.config = config_echo(config);
    bundle.notes = std::move(loaded.notes);
    bundle.skips = std::move(sweeps.skips);
    bundle.metrics = compute_metrics(config, sweeps);
    analyze_metrics(config, bundle);
    return bundle;
}

} // namespace compred
