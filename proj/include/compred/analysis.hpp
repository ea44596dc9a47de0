#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace compred {

/// Per-subject values of one metric at one horizon length.
struct LevelSamples {
    double horizon_ms = 0.0;
    std::vector<double> values;
};

struct FitResult {
    int degree = 0;
    /// Lowest order first, in units of the metric per ms^j.
    std::vector<double> coefficients;
    double r_squared = 0.0;
    std::vector<double> level_horizons_ms;
    std::vector<double> level_weights;
    /// Levels whose sample variance was zero (or undefined) and got 1/epsilon.
    std::vector<bool> level_weight_fallback;
    double weighted_rss = 0.0;
    double weighted_tss = 0.0;
    std::size_t n_total = 0;
    /// Total weighted spread is zero, so R^2 carries no information.
    bool degenerate = false;

    std::size_t n_params() const { return coefficients.size(); }
    double evaluate(double horizon_ms) const;
    bool any_weight_fallback() const;
};

struct TestResult {
    double statistic = 0.0;
    double df1 = 0.0;
    /// Second (denominator) df for F statistics; unused for t.
    double df2 = 0.0;
    double p_value = 1.0;
    std::optional<double> effect_size;
    std::optional<double> adjusted_p;
    /// Nested F-test where the fuller model leaves no residual.
    bool perfect_fit = false;
};

/// Minimises sum_levels w_T sum_subjects (y - poly(T))^2 with w_T = 1/s_T^2.
/// Levels with zero or undefined variance use 1/zero_variance_epsilon and are
/// flagged in the result.
FitResult wls_polyfit(std::span<const LevelSamples> levels, int degree, double zero_variance_epsilon = 1e-12);

/// Residual sums below this fraction of the total weighted spread count as zero.
inline constexpr double kPerfectFitTolerance = 1e-24;

TestResult nested_f_test(const FitResult& reduced, const FitResult& full);

/// Cubic-vs-quadratic first; quadratic-vs-linear only when no cubic trend is
/// found.
struct TrendSelection {
    std::optional<FitResult> linear;
    std::optional<FitResult> quadratic;
    std::optional<FitResult> cubic;
    std::optional<TestResult> cubic_vs_quadratic;
    std::optional<TestResult> quadratic_vs_linear;
    int selected_degree = 1;

    const FitResult& selected() const;
};

TrendSelection select_trend(std::span<const LevelSamples> levels, double alpha = 0.05,
                            double zero_variance_epsilon = 1e-12);

TestResult welch_anova(std::span<const std::vector<double>> groups);
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);

enum class CohensDVariant {
    Pooled,           // (n_a-1)s_a^2 + (n_b-1)s_b^2 over n_a+n_b-2
    AverageVariance,  // (s_a^2 + s_b^2) / 2
};
std::string_view to_string(CohensDVariant variant);
CohensDVariant parse_cohens_d(std::string_view name);

double cohens_d(std::span<const double> a, std::span<const double> b,
                CohensDVariant variant = CohensDVariant::Pooled);

inline constexpr double kSmallEffect = 0.2;
inline constexpr double kMediumEffect = 0.5;
inline constexpr double kLargeEffect = 0.8;

/// "negligible" | "small" | "medium" | "large" by |d|.
std::string_view effect_magnitude(double d);

struct ConfidenceInterval {
    double mean = 0.0;
    double low = 0.0;
    double high = 0.0;
};

/// mean +- t_{(1+level)/2, n-1} s / sqrt(n).
ConfidenceInterval confidence_interval(std::span<const double> values, double level = 0.95);

double sample_mean(std::span<const double> values);
/// n - 1 denominator.
double sample_variance(std::span<const double> values);

} // namespace compred
