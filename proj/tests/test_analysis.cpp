#include <gtest/gtest.h>

#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "compred/analysis.hpp"
#include "compred/distributions.hpp"
#include "compred/errors.hpp"

using namespace compred;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Explicit (X^T W X)^-1 X^T W y in 50-digit arithmetic, weights 1/s^2 per level.
struct OracleFit {
    std::vector<Big> coefficients;
    Big wrss = 0;
};

OracleFit oracle_wls(const std::vector<LevelSamples>& levels, int degree, double eps = 1e-12)
{
    const int p = degree + 1;
    std::vector<std::vector<Big>> m(p, std::vector<Big>(p + 1, Big(0)));
    std::vector<Big> weights;
    for (const LevelSamples& l : levels) {
        Big w;
        if (l.values.size() < 2) {
            w = 1 / Big(eps);
        } else {
            Big mean = 0;
            for (double v : l.values) {
                mean += v;
            }
            mean /= l.values.size();
            Big ss = 0;
            for (double v : l.values) {
                ss += (v - mean) * (v - mean);
            }
            const Big var = ss / (l.values.size() - 1);
            w = var == 0 ? 1 / Big(eps) : 1 / var;
        }
        weights.push_back(w);
        for (double v : l.values) {
            std::vector<Big> row(p);
            Big t = 1;
            for (int j = 0; j < p; ++j) {
                row[j] = t;
                t *= Big(l.horizon_ms);
            }
            for (int r = 0; r < p; ++r) {
                for (int c = 0; c < p; ++c) {
                    m[r][c] += w * row[r] * row[c];
                }
                m[r][p] += w * row[r] * Big(v);
            }
        }
    }
    for (int col = 0; col < p; ++col) {
        int pivot = col;
        for (int r = col + 1; r < p; ++r) {
            if (abs(m[r][col]) > abs(m[pivot][col])) {
                pivot = r;
            }
        }
        std::swap(m[col], m[pivot]);
        for (int r = 0; r < p; ++r) {
            if (r != col) {
                const Big f = m[r][col] / m[col][col];
                for (int c = col; c <= p; ++c) {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    OracleFit out;
    for (int j = 0; j < p; ++j) {
        out.coefficients.push_back(m[j][p] / m[j][j]);
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (double v : levels[i].values) {
            Big fit = 0;
            Big t = 1;
            for (int j = 0; j < p; ++j) {
                fit += out.coefficients[j] * t;
                t *= Big(levels[i].horizon_ms);
            }
            out.wrss += weights[i] * (Big(v) - fit) * (Big(v) - fit);
        }
    }
    return out;
}

std::vector<LevelSamples> noisy_levels(const std::function<double(double)>& f, double noise, std::uint64_t seed,
                                       std::size_t per_level = 10)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<LevelSamples> levels;
    for (double t : {125.0, 250.0, 375.0, 500.0, 625.0}) {
        LevelSamples l{t, {}};
        for (std::size_t i = 0; i < per_level; ++i) {
            l.values.push_back(f(t) + noise * (1.0 + t / 625.0) * n(rng));
        }
        levels.push_back(l);
    }
    return levels;
}

std::vector<double> standardized(std::vector<double> v)
{
    const double m = sample_mean(v);
    for (double& x : v) {
        x -= m;
    }
    const double s = std::sqrt(sample_variance(v));
    for (double& x : v) {
        x /= s;
    }
    return v;
}

} // namespace

TEST(WlsPolyfit, ExactQuadratic)
{
    std::vector<LevelSamples> levels;
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        levels.push_back({t, std::vector<double>(4, 2.0 + 3.0 * t * t)});
    }
    const FitResult fit = wls_polyfit(levels, 2);
    ASSERT_EQ(fit.coefficients.size(), 3u);
    EXPECT_NEAR(fit.coefficients[0], 2.0, 1e-9);
    EXPECT_NEAR(fit.coefficients[1], 0.0, 1e-9);
    EXPECT_NEAR(fit.coefficients[2], 3.0, 1e-9);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    EXPECT_TRUE(fit.any_weight_fallback());
    EXPECT_NEAR(fit.evaluate(6.0), 110.0, 1e-8);
}

TEST(WlsPolyfit, LinearOnQuadraticDataMatchesNormalEquations)
{
    const auto levels = noisy_levels([](double t) { return 1e-3 + 2e-8 * t * t; }, 4e-4, 7);
    const FitResult fit = wls_polyfit(levels, 1);
    const OracleFit oracle = oracle_wls(levels, 1);
    EXPECT_LT(fit.r_squared, 1.0);
    EXPECT_GE(fit.r_squared, 0.0);
    EXPECT_NEAR(fit.weighted_rss, static_cast<double>(oracle.wrss), 1e-9 * static_cast<double>(oracle.wrss));
    for (std::size_t j = 0; j < 2; ++j) {
        const double c = static_cast<double>(oracle.coefficients[j]);
        EXPECT_NEAR(fit.coefficients[j], c, 1e-9 * std::abs(c));
    }
    ASSERT_EQ(fit.level_weights.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(fit.level_weights[i], 1.0 / sample_variance(levels[i].values),
                    1e-12 / sample_variance(levels[i].values));
        EXPECT_FALSE(fit.level_weight_fallback[i]);
    }
}

TEST(WlsPolyfit, CubicMatchesNormalEquations)
{
    const auto levels = noisy_levels([](double t) { return 0.3 - 1e-4 * t + 5e-7 * t * t - 3e-10 * t * t * t; }, 5e-3, 8);
    const FitResult fit = wls_polyfit(levels, 3);
    const OracleFit oracle = oracle_wls(levels, 3);
    EXPECT_NEAR(fit.weighted_rss, static_cast<double>(oracle.wrss), 1e-9 * static_cast<double>(oracle.wrss));
    for (std::size_t j = 0; j < 4; ++j) {
        const double c = static_cast<double>(oracle.coefficients[j]);
        EXPECT_NEAR(fit.coefficients[j], c, 1e-8 * std::abs(c));
    }
}

TEST(WlsPolyfit, SingleSubjectPerLevelIsOrdinaryLeastSquares)
{
    std::vector<LevelSamples> levels;
    const double ys[] = {0.9, 2.2, 2.8, 4.1, 5.3};
    for (int i = 0; i < 5; ++i) {
        levels.push_back({125.0 * (i + 1), {ys[i]}});
    }
    const FitResult fit = wls_polyfit(levels, 1);
    // OLS slope and intercept by hand.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& l : levels) {
        sx += l.horizon_ms;
        sy += l.values[0];
        sxx += l.horizon_ms * l.horizon_ms;
        sxy += l.horizon_ms * l.values[0];
    }
    const double slope = (5 * sxy - sx * sy) / (5 * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / 5;
    EXPECT_NEAR(fit.coefficients[1], slope, 1e-12 * std::abs(slope));
    EXPECT_NEAR(fit.coefficients[0], intercept, 1e-10 * std::abs(intercept));
    EXPECT_TRUE(fit.any_weight_fallback());
}

TEST(WlsPolyfit, Errors)
{
    std::vector<LevelSamples> two = {{125.0, {1.0, 2.0}}, {250.0, {2.0, 3.0}}};
    EXPECT_THROW(wls_polyfit(two, 2), InvalidArgument);
    EXPECT_THROW(wls_polyfit(two, -1), InvalidArgument);
    two[1].values.clear();
    EXPECT_THROW(wls_polyfit(two, 1), InvalidArgument);
    std::vector<LevelSamples> bad = {{125.0, {1.0, std::nan("")}}, {250.0, {2.0, 3.0}}};
    EXPECT_THROW(wls_polyfit(bad, 1), InvalidArgument);
}

TEST(WlsPolyfit, AllZeroIsDegenerate)
{
    std::vector<LevelSamples> zeros;
    for (double t : {125.0, 250.0, 375.0}) {
        zeros.push_back({t, {0.0, 0.0, 0.0}});
    }
    const FitResult fit = wls_polyfit(zeros, 2);
    EXPECT_TRUE(fit.degenerate);
    EXPECT_TRUE(fit.any_weight_fallback());
    EXPECT_EQ(fit.r_squared, 1.0);
}

TEST(NestedFTest, PerfectFullModel)
{
    std::vector<LevelSamples> levels;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1e-3);
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        const double y = 1.0 + t * t;
        levels.push_back({t, {y + n(rng), y - n(rng), y + n(rng)}});
    }
    const TestResult r = nested_f_test(wls_polyfit(levels, 1), wls_polyfit(levels, 2));
    EXPECT_LT(r.p_value, 1e-10);
    EXPECT_EQ(r.df1, 1.0);
    EXPECT_EQ(r.df2, 15.0 - 3.0);
}

TEST(NestedFTest, ExactQuadraticIsPerfectFit)
{
    std::vector<LevelSamples> levels;
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        const double y = 2.0 - t + 0.5 * t * t;
        levels.push_back({t, {y, y, y}});
    }
    const TestResult r = nested_f_test(wls_polyfit(levels, 1), wls_polyfit(levels, 2));
    EXPECT_TRUE(r.perfect_fit);
    EXPECT_TRUE(std::isinf(r.statistic));
    EXPECT_EQ(r.p_value, 0.0);

    const TestResult both = nested_f_test(wls_polyfit(levels, 2), wls_polyfit(levels, 3));
    EXPECT_FALSE(both.perfect_fit);
    EXPECT_EQ(both.statistic, 0.0);
    EXPECT_EQ(both.p_value, 1.0);
}

TEST(NestedFTest, NoImprovementGivesZero)
{
    // Level means lie exactly on a line; the quadratic term explains nothing.
    std::vector<LevelSamples> levels;
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        const double y = 3.0 + 0.5 * t;
        levels.push_back({t, {y - 0.25, y, y + 0.25}});
    }
    const TestResult r = nested_f_test(wls_polyfit(levels, 1), wls_polyfit(levels, 2));
    EXPECT_NEAR(r.statistic, 0.0, 1e-9);
    EXPECT_NEAR(r.p_value, 1.0, 1e-9);
}

TEST(NestedFTest, ArgumentChecks)
{
    const auto levels = noisy_levels([](double t) { return t; }, 1.0, 1);
    const auto other = noisy_levels([](double t) { return t; }, 1.0, 2);
    EXPECT_THROW(nested_f_test(wls_polyfit(levels, 2), wls_polyfit(levels, 1)), InvalidArgument);
    EXPECT_THROW(nested_f_test(wls_polyfit(levels, 1), wls_polyfit(other, 2)), InvalidArgument);
}

TEST(SelectTrend, CascadeOrder)
{
    const auto quad = noisy_levels([](double t) { return 1e-3 + 3e-8 * t * t; }, 1e-4, 11);
    const TrendSelection q = select_trend(quad);
    ASSERT_TRUE(q.cubic_vs_quadratic && q.quadratic_vs_linear);
    EXPECT_GT(q.cubic_vs_quadratic->p_value, 0.05);
    EXPECT_LT(q.quadratic_vs_linear->p_value, 0.05);
    EXPECT_EQ(q.selected_degree, 2);
    EXPECT_EQ(q.selected().degree, 2);

    const auto cubic = noisy_levels([](double t) { return 1e-9 * (t - 375.0) * (t - 375.0) * (t - 375.0); }, 1e-3, 12);
    const TrendSelection c = select_trend(cubic);
    EXPECT_EQ(c.selected_degree, 3);
    EXPECT_FALSE(c.quadratic_vs_linear.has_value());

    const auto line = noisy_levels([](double t) { return 0.5 + 1e-3 * t; }, 1e-3, 13);
    EXPECT_EQ(select_trend(line).selected_degree, 1);
}

TEST(WelchAnova, IdenticalGroups)
{
    const std::vector<std::vector<double>> g = {{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}};
    const TestResult r = welch_anova(g);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(WelchAnova, GoldenValue)
{
    const std::vector<std::vector<double>> g = {{1, 2, 3, 4}, {2, 3, 4, 5}, {10, 11, 12, 13}};
    const TestResult r = welch_anova(g);
    EXPECT_NEAR(r.statistic, 52.56, 1e-9);
    EXPECT_EQ(r.df1, 2.0);
    EXPECT_NEAR(r.df2, 6.0, 1e-12);
    EXPECT_NEAR(r.p_value, 1.574262146858115e-4, 1e-12);
    EXPECT_LT(r.p_value, 1e-3);
}

TEST(WelchAnova, TwoGroupsEqualsWelchT)
{
    const std::vector<double> a = {1.1, 2.7, 3.0, 4.4, 5.9, 2.2};
    const std::vector<double> b = {3.5, 4.1, 6.6, 5.0, 7.2};
    const std::vector<std::vector<double>> g = {a, b};
    const TestResult f = welch_anova(g);
    const TestResult t = welch_t_test(a, b);
    EXPECT_NEAR(f.statistic, t.statistic * t.statistic, 1e-12 * f.statistic);
    EXPECT_NEAR(f.df2, t.df1, 1e-10);
    EXPECT_NEAR(f.p_value, t.p_value, 1e-12);
}

TEST(WelchAnova, Degenerate)
{
    const std::vector<std::vector<double>> g = {{1, 1, 1}, {2, 3, 4}};
    EXPECT_THROW(welch_anova(g), DegenerateVariance);
    const std::vector<std::vector<double>> one = {{1, 2, 3}};
    EXPECT_THROW(welch_anova(one), InvalidArgument);
}

TEST(WelchT, Examples)
{
    const std::vector<double> a = {1, 2, 3, 4, 5};
    const std::vector<double> b = {2, 3, 4, 5, 6};
    const TestResult r = welch_t_test(a, b);
    EXPECT_DOUBLE_EQ(r.statistic, -1.0);
    EXPECT_DOUBLE_EQ(r.df1, 8.0);
    EXPECT_NEAR(r.p_value, 0.3466, 0.0005);
    EXPECT_NEAR(r.p_value, 0.3465935070873341, 1e-12);

    const TestResult same = welch_t_test(a, a);
    EXPECT_EQ(same.statistic, 0.0);
    EXPECT_EQ(same.p_value, 1.0);

    const std::vector<double> far = {101, 102, 103, 104, 105};
    EXPECT_LT(welch_t_test(a, far).p_value, 1e-6);
}

TEST(WelchT, SymmetryAndScaleInvariance)
{
    const std::vector<double> a = {0.3, 0.9, 0.4, 1.6, 1.1, 0.2, 0.8};
    const std::vector<double> b = {1.3, 2.0, 1.1, 2.7, 1.8};
    const TestResult ab = welch_t_test(a, b);
    const TestResult ba = welch_t_test(b, a);
    EXPECT_EQ(ab.statistic, -ba.statistic);
    EXPECT_EQ(ab.p_value, ba.p_value);

    std::vector<double> a2 = a, b2 = b;
    for (double& v : a2) {
        v *= 37.5;
    }
    for (double& v : b2) {
        v *= 37.5;
    }
    const TestResult scaled = welch_t_test(a2, b2);
    EXPECT_NEAR(scaled.statistic, ab.statistic, 1e-12 * std::abs(ab.statistic));
    EXPECT_NEAR(scaled.p_value, ab.p_value, 1e-12 * ab.p_value);
    EXPECT_NEAR(cohens_d(a2, b2), cohens_d(a, b), 1e-12 * std::abs(cohens_d(a, b)));
    const std::vector<std::vector<double>> g = {a, b, {0.5, 0.7, 0.9}};
    const std::vector<std::vector<double>> g2 = {a2, b2, {0.5 * 37.5, 0.7 * 37.5, 0.9 * 37.5}};
    EXPECT_NEAR(welch_anova(g2).statistic, welch_anova(g).statistic, 1e-12 * welch_anova(g).statistic);
    EXPECT_NEAR(welch_anova(g2).p_value, welch_anova(g).p_value, 1e-12 * welch_anova(g).p_value);
}

TEST(WelchT, Degenerate)
{
    const std::vector<double> c = {2, 2, 2};
    const std::vector<double> d = {3, 3, 3};
    EXPECT_THROW(welch_t_test(c, d), DegenerateVariance);
    const std::vector<double> one = {1.0};
    EXPECT_THROW(welch_t_test(one, d), InvalidArgument);
    const std::vector<double> spread = {1, 2, 3};
    EXPECT_NO_THROW(welch_t_test(c, spread));
}

TEST(Bonferroni, Examples)
{
    const std::vector<double> p = {0.01, 0.5};
    const auto adj = bonferroni(p, 3);
    EXPECT_DOUBLE_EQ(adj[0], 0.03);
    EXPECT_EQ(adj[1], 1.0);
    const std::vector<double> six(6, 0.004);
    for (double v : bonferroni(six, 6)) {
        EXPECT_DOUBLE_EQ(v, 0.024);
    }
    EXPECT_THROW(bonferroni(six, 5), InvalidArgument);
}

TEST(Bonferroni, MonotoneAndNeverBelowRaw)
{
    std::vector<double> p;
    for (int i = 0; i <= 100; ++i) {
        p.push_back(i / 100.0);
    }
    const auto adj = bonferroni(p, 101);
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_GE(adj[i], p[i]);
        EXPECT_EQ(adj[i], std::min(1.0, 101 * p[i]));
        if (i > 0) {
            EXPECT_GE(adj[i], adj[i - 1]);
        }
    }
}

TEST(CohensD, Examples)
{
    const std::vector<double> a = {1, 2, 3, 4};
    EXPECT_EQ(cohens_d(a, a), 0.0);

    const std::vector<double> z = standardized({0.3, -1.2, 2.2, 0.7, -0.4, 1.9, -2.0, 0.1, 0.5, -0.8});
    std::vector<double> shifted = z;
    for (double& v : shifted) {
        v += 1.0;
    }
    EXPECT_NEAR(cohens_d(shifted, z), 1.0, 1e-12);
    EXPECT_NEAR(cohens_d(shifted, z, CohensDVariant::AverageVariance), 1.0, 1e-12);

    const std::vector<double> c = {5, 5, 5};
    EXPECT_THROW(cohens_d(c, c), DegenerateVariance);
}

TEST(CohensD, VariantsDifferForUnequalSizes)
{
    const std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<double> b = {2, 8, 5};
    const double pooled = cohens_d(a, b);
    const double avg = cohens_d(a, b, CohensDVariant::AverageVariance);
    const double va = sample_variance(a), vb = sample_variance(b);
    EXPECT_NEAR(pooled, (4.5 - 5.0) / std::sqrt((7 * va + 2 * vb) / 9.0), 1e-14);
    EXPECT_NEAR(avg, (4.5 - 5.0) / std::sqrt((va + vb) / 2.0), 1e-14);
    EXPECT_EQ(parse_cohens_d(to_string(CohensDVariant::AverageVariance)), CohensDVariant::AverageVariance);
}

TEST(CohensD, Magnitudes)
{
    EXPECT_EQ(kSmallEffect, 0.2);
    EXPECT_EQ(kMediumEffect, 0.5);
    EXPECT_EQ(kLargeEffect, 0.8);
    EXPECT_EQ(effect_magnitude(0.1), "negligible");
    EXPECT_EQ(effect_magnitude(-0.2), "small");
    EXPECT_EQ(effect_magnitude(0.5), "medium");
    EXPECT_EQ(effect_magnitude(-3.0), "large");
}

TEST(ConfidenceInterval, Examples)
{
    const std::vector<double> c(6, 4.2);
    const ConfidenceInterval flat = confidence_interval(c);
    EXPECT_EQ(flat.low, 4.2);
    EXPECT_EQ(flat.high, 4.2);

    const std::vector<double> z = standardized({0.3, -1.2, 2.2, 0.7, -0.4, 1.9, -2.0, 0.1, 0.5, -0.8});
    const ConfidenceInterval ci = confidence_interval(z, 0.95);
    EXPECT_NEAR(ci.low, -0.7153569059706649, 1e-9);
    EXPECT_NEAR(ci.high, 0.7153569059706649, 1e-9);
    EXPECT_NEAR(ci.mean, 0.0, 1e-15);

    const ConfidenceInterval wide = confidence_interval(z, 0.99);
    EXPECT_LT(wide.low, ci.low);
    EXPECT_GT(wide.high, ci.high);

    const std::vector<double> one = {1.0};
    EXPECT_THROW(confidence_interval(one), InvalidArgument);
    EXPECT_THROW(confidence_interval(z, 1.0), InvalidArgument);
}
