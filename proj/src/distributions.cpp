#include "compred/distributions.hpp"

#include <cmath>
#include <limits>

#include "compred/errors.hpp"

namespace compred::dist {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 20000;

// Continued fraction for I_x(a,b), modified Lentz.
double beta_continued_fraction(double a, double b, double x)
{
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxTerms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return h;
        }
    }
    return h;
}

double log_beta(double a, double b)
{
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

} // namespace

double incomplete_beta(double a, double b, double x, double y)
{
    if (!(a > 0.0) || !(b > 0.0) || std::isnan(x) || std::isnan(y)) {
        throw InvalidArgument("incomplete_beta: a, b must be positive");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (y <= 0.0) {
        return 1.0;
    }
    const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

double incomplete_beta(double a, double b, double x)
{
    return incomplete_beta(a, b, x, 1.0 - x);
}

double students_t_two_sided(double t, double df)
{
    if (!(df > 0.0)) {
        throw InvalidArgument("students_t: df must be positive");
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    const double t2 = t * t;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
}

double students_t_cdf(double t, double df)
{
    const double tail = 0.5 * students_t_two_sided(t, df);
    return t > 0.0 ? 1.0 - tail : tail;
}

double students_t_quantile(double p, double df)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("students_t_quantile: p must lie in (0, 1)");
    }
    if (p == 0.5) {
        return 0.0;
    }
    if (p < 0.5) {
        return -students_t_quantile(1.0 - p, df);
    }
    double lo = 0.0;
    double hi = 1.0;
    while (students_t_cdf(hi, df) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) {
            return std::numeric_limits<double>::infinity();
        }
    }
    for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (students_t_cdf(mid, df) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double fisher_f_cdf(double f, double df1, double df2)
{
    if (!(df1 > 0.0) || !(df2 > 0.0)) {
        throw InvalidArgument("fisher_f: degrees of freedom must be positive");
    }
    if (f <= 0.0) {
        return 0.0;
    }
    if (std::isinf(f)) {
        return 1.0;
    }
    const double denom = df1 * f + df2;
    return incomplete_beta(df1 / 2.0, df2 / 2.0, df1 * f / denom, df2 / denom);
}

double fisher_f_sf(double f, double df1, double df2)
{
    if (!(df1 > 0.0) || !(df2 > 0.0)) {
        throw InvalidArgument("fisher_f: degrees of freedom must be positive");
    }
    if (f <= 0.0) {
        return 1.0;
    }
    if (std::isinf(f)) {
        return 0.0;
    }
    const double denom = df1 * f + df2;
    return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / denom, df1 * f / denom);
}

} // namespace compred::dist
