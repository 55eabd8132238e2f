#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bivadj/adjustments.hpp"

namespace bivadj {

/// Attainable correlation interval for a marginal/adjustment combination.
struct CorrRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// One conditional slice f(y | x) of a bivariate model: the free-axis
/// marginal reweighted by 1 + alpha h_fixed(value) h(y).
struct Conditional {
  MarginalSpec marginal;  // free axis
  AdjustmentSpec adj;     // free axis
  double alpha_h = 0.0;   // alpha * h_fixed(value)

  double pdf(double y) const;
  double cdf(double y) const;
  /// Inverse cdf; continuous marginals only (bisection + closed-form cdf).
  double quantile(double u) const;
};

/// The bivariate density f1(x) f2(y) {1 + alpha h1(x) h2(y)}. Immutable after
/// construction; alpha is validated strictly inside the admissible range.
class BivariateModel {
 public:
  BivariateModel(MarginalSpec m1, AdjustmentSpec adj1, MarginalSpec m2, AdjustmentSpec adj2,
                 double alpha);

  /// Open admissible interval (-1/(c1 c2), 1/(c1 c2)).
  static std::pair<double, double> alpha_range(const MarginalSpec& m1, const AdjustmentSpec& adj1,
                                               const MarginalSpec& m2, const AdjustmentSpec& adj2);

  /// Attainable correlation interval: |corr| at the alpha-range endpoint.
  static CorrRange corr_range(const MarginalSpec& m1, const AdjustmentSpec& adj1,
                              const MarginalSpec& m2, const AdjustmentSpec& adj2);

  const MarginalSpec& m1() const { return m1_; }
  const MarginalSpec& m2() const { return m2_; }
  const AdjustmentSpec& adj1() const { return adj1_; }
  const AdjustmentSpec& adj2() const { return adj2_; }
  double alpha() const { return alpha_; }
  double center1() const { return a1_; }
  double center2() const { return a2_; }

  /// Joint mass/density at (x, y). Throws std::domain_error off support and
  /// std::runtime_error if the bracket is negative beyond -1e-12 (an invalid
  /// model rather than a rounding artifact).
  double density(double x, double y) const;

  Conditional conditional_given_x(double x) const;
  Conditional conditional_given_y(double y) const;

  /// corr(X,Y) = alpha nu1 nu2 / (sigma1 sigma2).
  double correlation() const;

  /// n i.i.d. pairs: X from the first marginal by inverse cdf, then Y from
  /// the conditional given X. Deterministic for a given seed.
  std::vector<std::pair<double, double>> sample(std::size_t n, std::uint64_t seed) const;

 private:
  MarginalSpec m1_, m2_;
  AdjustmentSpec adj1_, adj2_;
  double alpha_;
  double a1_, a2_, c1_, c2_;
};

/// Exact binormal(0,0,1,1,rho) density over phi(x)phi(y); the expansion
/// 1 + rho x y + O(rho^2) is property-tested against it.
double binormal_ratio(double x, double y, double rho);

}  // namespace bivadj
