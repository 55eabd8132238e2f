#pragma once

#include <string>
#include <utility>

namespace bivadj {

enum class Family { Poisson, Binomial, Normal, Exponential };

/// A univariate marginal: one of the four families used by the bivariate
/// adjustment models. Values are immutable and cheap to copy; all member
/// functions are pure.
struct MarginalSpec {
  Family family = Family::Poisson;
  double theta = 1.0;   // Poisson / Exponential rate
  int trials = 0;       // Binomial n
  double prob = 0.0;    // Binomial p
  double loc = 0.0;     // Normal xi
  double scale = 1.0;   // Normal sigma

  static MarginalSpec poisson(double theta);
  static MarginalSpec binomial(int n, double p);
  static MarginalSpec normal(double xi, double sigma);
  static MarginalSpec exponential(double theta);

  bool discrete() const {
    return family == Family::Poisson || family == Family::Binomial;
  }

  double mean() const;
  double sd() const;
  std::pair<double, double> mean_sd() const { return {mean(), sd()}; }

  /// pmf (discrete) or pdf (continuous) at x. Computed in log space for
  /// large arguments; throws std::domain_error for x outside the support.
  double pmf_or_pdf(double x) const;
  double log_pmf_or_pdf(double x) const;

  /// P(X <= x). Exact finite sums for the discrete families, erfc-based for
  /// the normal.
  double cdf(double x) const;

  /// Inverse cdf for the continuous families (sampling path).
  double quantile(double u) const;

  /// Truncation point for discrete supports: the smallest k with upper tail
  /// mass below tail_mass (binomial: n). Used by brute-force sums and
  /// sampling tables.
  int support_max(double tail_mass = 1e-14) const;

  std::string describe() const;
};

}  // namespace bivadj
