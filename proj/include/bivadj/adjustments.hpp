#pragma once

#include <string>

#include "bivadj/marginals.hpp"

namespace bivadj {

enum class AdjustmentFamily {
  ExpDecay,            // g(x) = exp(-t x), Poisson or Exponential marginal
  IndicatorThreshold,  // g(x) = I(x <= x0), Binomial marginal
  LinearCentered,      // g(x) = x/n, Binomial marginal
  PhiKernel,           // g(x) = phi(z), Normal marginal
  QuadrantIndicator,   // g(x) = I(z <= 0), Normal marginal
  ExpQuadratic,        // g(x) = exp(s z - t z^2 / 2), Normal marginal
  LimitBrutal,         // g(0) = 1, g(x>=1) = 0, Poisson marginal (t -> inf)
};

/// An adjustment family g with its centering constant a = E g(X), sup-norm
/// bound c = sup |g - a|, and cross moment nu = E X (g(X) - a), all in closed
/// form against a bound marginal. The centered function h = g - a multiplies
/// the cross term of the bivariate density.
struct AdjustmentSpec {
  AdjustmentFamily family = AdjustmentFamily::ExpDecay;
  double t = 1.0;   // ExpDecay rate / ExpQuadratic curvature
  double s = 0.0;   // ExpQuadratic slope
  double x0 = 0.0;  // IndicatorThreshold cut point

  static AdjustmentSpec exp_decay(double t);
  static AdjustmentSpec indicator_threshold(double x0);
  static AdjustmentSpec linear_centered();
  static AdjustmentSpec phi_kernel();
  static AdjustmentSpec quadrant_indicator();
  static AdjustmentSpec exp_quadratic(double s, double t);
  static AdjustmentSpec limit_brutal();

  bool compatible_with(const MarginalSpec& m) const;
  /// Throws std::invalid_argument on an unsupported pairing.
  void require_compatible(const MarginalSpec& m) const;

  double g(double x, const MarginalSpec& m) const;
  double h(double x, const MarginalSpec& m) const { return g(x, m) - center(m); }

  /// a = E g(X) under m.
  double center(const MarginalSpec& m) const;
  /// c = sup over the support of |g(x) - a|.
  double bound(const MarginalSpec& m) const;
  /// nu = E X h(X); exact (the indicator families use exact finite sums, not
  /// the normal approximation).
  double nu(const MarginalSpec& m) const;

  /// Integral of f*g over (-inf, y] for the continuous pairings; feeds the
  /// conditional cdf used in sampling.
  double partial_gf(double y, const MarginalSpec& m) const;

  std::string describe() const;
};

/// The normal-approximation cross moment -(npq)^{1/2} phi((x0-np)/(npq)^{1/2})
/// for the indicator adjustment; exposed for documentation and comparison
/// against the exact finite sum, not used in inference.
double nu_approx_indicator(int n, double p, double x0);

}  // namespace bivadj
