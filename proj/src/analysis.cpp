#include "compred/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "compred/distributions.hpp"
#include "compred/errors.hpp"

namespace compred {

namespace {

// Horizons are fitted in seconds internally; coefficients are converted back
// to per-ms units afterwards.
constexpr double kFitScale = 1e-3;

void require_finite(std::span<const double> values, const char* what)
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument(std::string(what) + ": non-finite value");
        }
    }
}

} // namespace

double sample_mean(std::span<const double> values)
{
    if (values.empty()) {
        throw InvalidArgument("mean of an empty sample");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values)
{
    if (values.size() < 2) {
        throw InvalidArgument("variance needs at least two values");
    }
    const double m = sample_mean(values);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m) * (v - m);
    }
    return ss / static_cast<double>(values.size() - 1);
}

double FitResult::evaluate(double horizon_ms) const
{
    double acc = 0.0;
    for (std::size_t j = coefficients.size(); j-- > 0;) {
        acc = acc * horizon_ms + coefficients[j];
    }
    return acc;
}

bool FitResult::any_weight_fallback() const
{
    return std::any_of(level_weight_fallback.begin(), level_weight_fallback.end(), [](bool b) { return b; });
}

FitResult wls_polyfit(std::span<const LevelSamples> levels, int degree, double zero_variance_epsilon)
{
    if (degree < 0) {
        throw InvalidArgument("wls_polyfit: degree must be non-negative");
    }
    if (!(zero_variance_epsilon > 0.0)) {
        throw InvalidArgument("wls_polyfit: zero-variance epsilon must be positive");
    }
    std::set<double> distinct;
    std::size_t n = 0;
    for (const LevelSamples& level : levels) {
        if (level.values.empty()) {
            throw InvalidArgument("wls_polyfit: empty level at T = " + std::to_string(level.horizon_ms));
        }
        require_finite(level.values, "wls_polyfit");
        distinct.insert(level.horizon_ms);
        n += level.values.size();
    }
    if (static_cast<int>(distinct.size()) <= degree) {
        throw InvalidArgument("wls_polyfit: degree " + std::to_string(degree) + " needs more than " +
                              std::to_string(degree) + " distinct horizon levels, got " +
                              std::to_string(distinct.size()));
    }

    FitResult fit;
    fit.degree = degree;
    fit.n_total = n;
    const int p = degree + 1;

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    Eigen::Index row = 0;
    for (const LevelSamples& level : levels) {
        double weight = 1.0 / zero_variance_epsilon;
        bool fallback = true;
        if (level.values.size() >= 2) {
            const double var = sample_variance(level.values);
            if (var > 0.0) {
                weight = 1.0 / var;
                fallback = false;
            }
        }
        fit.level_horizons_ms.push_back(level.horizon_ms);
        fit.level_weights.push_back(weight);
        fit.level_weight_fallback.push_back(fallback);
        const double t = level.horizon_ms * kFitScale;
        for (double v : level.values) {
            double power = 1.0;
            for (int j = 0; j < p; ++j) {
                x(row, j) = power;
                power *= t;
            }
            y(row) = v;
            w(row) = weight;
            ++row;
        }
    }

    const Eigen::VectorXd sqrt_w = w.cwiseSqrt();
    const Eigen::MatrixXd xw = sqrt_w.asDiagonal() * x;
    const Eigen::VectorXd yw = sqrt_w.cwiseProduct(y);
    const Eigen::VectorXd beta = xw.colPivHouseholderQr().solve(yw);

    const Eigen::VectorXd residual = y - x * beta;
    fit.weighted_rss = (w.array() * residual.array().square()).sum();
    const double w_mean = (w.array() * y.array()).sum() / w.sum();
    fit.weighted_tss = (w.array() * (y.array() - w_mean).square()).sum();

    fit.coefficients.resize(static_cast<std::size_t>(p));
    double scale = 1.0;
    for (int j = 0; j < p; ++j) {
        fit.coefficients[static_cast<std::size_t>(j)] = beta(j) * scale;
        scale *= kFitScale;
    }

    if (fit.weighted_tss > 0.0) {
        fit.r_squared = std::clamp(1.0 - fit.weighted_rss / fit.weighted_tss, 0.0, 1.0);
    } else {
        fit.degenerate = true;
        fit.r_squared = 1.0;
    }
    return fit;
}

TestResult nested_f_test(const FitResult& reduced, const FitResult& full)
{
    if (reduced.n_total != full.n_total || reduced.level_horizons_ms != full.level_horizons_ms ||
        reduced.level_weights != full.level_weights ||
        std::abs(reduced.weighted_tss - full.weighted_tss) > 1e-9 * std::max(reduced.weighted_tss, full.weighted_tss)) {
        throw InvalidArgument("nested_f_test: fits use different data");
    }
    const double p_r = static_cast<double>(reduced.n_params());
    const double p_f = static_cast<double>(full.n_params());
    const double n = static_cast<double>(full.n_total);
    if (!(p_f > p_r)) {
        throw InvalidArgument("nested_f_test: the full model must have more parameters");
    }
    if (!(n > p_f)) {
        throw InvalidArgument("nested_f_test: no residual degrees of freedom");
    }
    TestResult r;
    r.df1 = p_f - p_r;
    r.df2 = n - p_f;

    const double zero = kPerfectFitTolerance * std::max(full.weighted_tss, reduced.weighted_tss);
    const bool full_zero = full.weighted_rss <= zero;
    const bool reduced_zero = reduced.weighted_rss <= zero;
    if (full_zero && reduced_zero) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    if (full_zero) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        r.perfect_fit = true;
        return r;
    }
    const double gain = std::max(0.0, reduced.weighted_rss - full.weighted_rss);
    r.statistic = (gain / r.df1) / (full.weighted_rss / r.df2);
    r.p_value = dist::fisher_f_sf(r.statistic, r.df1, r.df2);
    return r;
}

const FitResult& TrendSelection::selected() const
{
    switch (selected_degree) {
    case 3: return *cubic;
    case 2: return *quadratic;
    default: return *linear;
    }
}

TrendSelection select_trend(std::span<const LevelSamples> levels, double alpha, double zero_variance_epsilon)
{
    std::set<double> distinct;
    for (const LevelSamples& l : levels) {
        distinct.insert(l.horizon_ms);
    }
    TrendSelection sel;
    sel.linear = wls_polyfit(levels, 1, zero_variance_epsilon);
    sel.selected_degree = 1;
    if (distinct.size() < 3) {
        return sel;
    }
    sel.quadratic = wls_polyfit(levels, 2, zero_variance_epsilon);
    if (distinct.size() >= 4) {
        sel.cubic = wls_polyfit(levels, 3, zero_variance_epsilon);
        if (sel.cubic->n_total > sel.cubic->n_params()) {
            sel.cubic_vs_quadratic = nested_f_test(*sel.quadratic, *sel.cubic);
            if (sel.cubic_vs_quadratic->p_value < alpha) {
                sel.selected_degree = 3;
                return sel;
            }
        }
    }
    if (sel.quadratic->n_total > sel.quadratic->n_params()) {
        sel.quadratic_vs_linear = nested_f_test(*sel.linear, *sel.quadratic);
        if (sel.quadratic_vs_linear->p_value < alpha) {
            sel.selected_degree = 2;
        }
    }
    return sel;
}

TestResult welch_anova(std::span<const std::vector<double>> groups)
{
    if (groups.size() < 2) {
        throw InvalidArgument("welch_anova: needs at least two groups");
    }
    const double k = static_cast<double>(groups.size());
    std::vector<double> means, weights, sizes;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].size() < 2) {
            throw InvalidArgument("welch_anova: every group needs at least two values");
        }
        require_finite(groups[g], "welch_anova");
        const double var = sample_variance(groups[g]);
        if (!(var > 0.0)) {
            throw DegenerateVariance("welch_anova: group " + std::to_string(g) + " has zero variance");
        }
        const double size = static_cast<double>(groups[g].size());
        means.push_back(sample_mean(groups[g]));
        sizes.push_back(size);
        weights.push_back(size / var);
    }
    double w_sum = 0.0, weighted = 0.0;
    for (std::size_t g = 0; g < means.size(); ++g) {
        w_sum += weights[g];
        weighted += weights[g] * means[g];
    }
    const double grand = weighted / w_sum;
    double between = 0.0, lambda = 0.0;
    for (std::size_t g = 0; g < means.size(); ++g) {
        between += weights[g] * (means[g] - grand) * (means[g] - grand);
        const double share = 1.0 - weights[g] / w_sum;
        lambda += share * share / (sizes[g] - 1.0);
    }
    between /= (k - 1.0);
    const double correction = 1.0 + 2.0 * (k - 2.0) * lambda / (k * k - 1.0);

    TestResult r;
    r.statistic = between / correction;
    r.df1 = k - 1.0;
    r.df2 = (k * k - 1.0) / (3.0 * lambda);
    r.p_value = dist::fisher_f_sf(r.statistic, r.df1, r.df2);
    return r;
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 2 || b.size() < 2) {
        throw InvalidArgument("welch_t_test: each sample needs at least two values");
    }
    require_finite(a, "welch_t_test");
    require_finite(b, "welch_t_test");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_variance(a) / na;
    const double vb = sample_variance(b) / nb;
    if (!(va + vb > 0.0)) {
        throw DegenerateVariance("welch_t_test: both samples have zero variance");
    }
    TestResult r;
    r.statistic = (sample_mean(a) - sample_mean(b)) / std::sqrt(va + vb);
    r.df1 = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.p_value = dist::students_t_two_sided(r.statistic, r.df1);
    return r;
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m)
{
    if (m < p_values.size()) {
        throw InvalidArgument("bonferroni: family size smaller than the number of tests");
    }
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) {
        out.push_back(std::min(1.0, static_cast<double>(m) * p));
    }
    return out;
}

std::string_view to_string(CohensDVariant variant)
{
    return variant == CohensDVariant::AverageVariance ? "average" : "pooled";
}

CohensDVariant parse_cohens_d(std::string_view name)
{
    if (name == "pooled") {
        return CohensDVariant::Pooled;
    }
    if (name == "average") {
        return CohensDVariant::AverageVariance;
    }
    throw InvalidArgument("unknown Cohen's d variant '" + std::string(name) + "'");
}

double cohens_d(std::span<const double> a, std::span<const double> b, CohensDVariant variant)
{
    if (a.size() < 2 || b.size() < 2) {
        throw InvalidArgument("cohens_d: each sample needs at least two values");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_variance(a);
    const double vb = sample_variance(b);
    const double spread = variant == CohensDVariant::Pooled
                              ? ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0)
                              : 0.5 * (va + vb);
    if (!(spread > 0.0)) {
        throw DegenerateVariance("cohens_d: pooled variance is zero");
    }
    return (sample_mean(a) - sample_mean(b)) / std::sqrt(spread);
}

std::string_view effect_magnitude(double d)
{
    const double m = std::abs(d);
    if (m >= kLargeEffect) {
        return "large";
    }
    if (m >= kMediumEffect) {
        return "medium";
    }
    if (m >= kSmallEffect) {
        return "small";
    }
    return "negligible";
}

ConfidenceInterval confidence_interval(std::span<const double> values, double level)
{
    if (values.size() < 2) {
        throw InvalidArgument("confidence_interval: needs at least two values");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidArgument("confidence_interval: level must lie in (0, 1)");
    }
    const double n = static_cast<double>(values.size());
    ConfidenceInterval ci;
    ci.mean = sample_mean(values);
    const double half = dist::students_t_quantile(0.5 * (1.0 + level), n - 1.0) * std::sqrt(sample_variance(values) / n);
    ci.low = ci.mean - half;
    ci.high = ci.mean + half;
    return ci;
}

} // namespace compred
