#pragma once

// Scalar special functions shared by the distribution kernels and the
// confidence-curve machinery. Everything here is a pure function.

namespace bivadj {

/// Standard normal density phi(z).
double norm_pdf(double z);

/// Standard normal cdf Phi(z), erfc-based (accurate in both tails).
double norm_cdf(double z);

/// Inverse of norm_cdf on (0,1). Throws std::domain_error outside.
double norm_quantile(double p);

/// P(chi^2_1 <= d) = 2 Phi(sqrt(d)) - 1. Throws std::domain_error for d < 0.
double chi1_cdf(double d);

/// Inverse of chi1_cdf on [0,1).
double chi1_quantile(double p);

/// Regularized lower incomplete gamma P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double gamma_q(double a, double x);

/// Chi-square cdf with df degrees of freedom.
double chisq_cdf(double df, double x);

/// log C(n,k) via lgamma.
double log_choose(double n, double k);

}  // namespace bivadj
