#pragma once

// Distribution functions used by the tests in this library. All throw
// DomainError outside their parameter domains.

namespace reliance::stats {

/// Regularized incomplete beta I_x(a, b).
double ibeta(double a, double b, double x);

double normal_cdf(double z);

/// Student t with `df` > 0 degrees of freedom.
double t_cdf(double t, double df);
/// P(|T| >= |t|).
double t_two_sided_p(double t, double df);
/// Inverse of t_cdf for p in (0, 1).
double t_quantile(double p, double df);

double f_cdf(double f, double df1, double df2);
/// Upper tail 1 - f_cdf, computed without cancellation.
double f_sf(double f, double df1, double df2);

/// Studentized range CDF P(Q <= q) for `k` means and `df` error degrees of
/// freedom. df = infinity is allowed.
double ptukey(double q, int k, double df);

}  // namespace reliance::stats
