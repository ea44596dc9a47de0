#pragma once

namespace compred::dist {

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately keeps precision when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);
double incomplete_beta(double a, double b, double x);

double students_t_cdf(double t, double df);
/// P(|T| >= |t|).
double students_t_two_sided(double t, double df);
/// Inverse of students_t_cdf for p in (0, 1).
double students_t_quantile(double p, double df);

double fisher_f_cdf(double f, double df1, double df2);
/// P(F >= f).
double fisher_f_sf(double f, double df1, double df2);

} // namespace compred::dist
