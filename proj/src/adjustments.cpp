#include "bivadj/adjustments.hpp"

#include <cmath>
#include <stdexcept>

#include "bivadj/special.hpp"

namespace bivadj {

namespace {

constexpr double kInvTwoSqrtPi = 0.28209479177387814347;  // 1/(2 sqrt(pi)) = phi(0)/sqrt(2)

// sum_{j<=k} j*pmf(j) for a binomial, same downward recurrence as the cdf
double binomial_partial_xsum(int k, int n, double p) {
  if (k < 0) return 0.0;
  if (k > n) k = n;
  const MarginalSpec m = MarginalSpec::binomial(n, p);
  double term = m.pmf_or_pdf(static_cast<double>(k));
  double sum = k * term;
  const double q = 1.0 - p;
  for (int j = k; j > 0; --j) {
    const double ratio = (j * q) / ((n - j + 1.0) * p);  // pmf(j-1)/pmf(j)
    term *= ratio;
    sum += (j - 1.0) * term;
    // terms grow on the way down to the mode; only stop once they decay
    if (ratio < 1.0 && j * term < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return sum;
}

}  // namespace

AdjustmentSpec AdjustmentSpec::exp_decay(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("exp_decay: t must be positive");
  AdjustmentSpec a;
  a.family = AdjustmentFamily::ExpDecay;
  a.t = t;
  return a;
}

AdjustmentSpec AdjustmentSpec::indicator_threshold(double x0) {
  if (!(x0 >= 0.0) || x0 != std::floor(x0))
    throw std::invalid_argument("indicator_threshold: x0 must be a nonnegative integer");
  AdjustmentSpec a;
  a.family = AdjustmentFamily::IndicatorThreshold;
  a.x0 = x0;
  return a;
}

AdjustmentSpec AdjustmentSpec::linear_centered() {
  AdjustmentSpec a;
  a.family = AdjustmentFamily::LinearCentered;
  return a;
}

AdjustmentSpec AdjustmentSpec::phi_kernel() {
  AdjustmentSpec a;
  a.family = AdjustmentFamily::PhiKernel;
  return a;
}

AdjustmentSpec AdjustmentSpec::quadrant_indicator() {
  AdjustmentSpec a;
  a.family = AdjustmentFamily::QuadrantIndicator;
  return a;
}

AdjustmentSpec AdjustmentSpec::exp_quadratic(double s, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("exp_quadratic: t must be positive");
  AdjustmentSpec a;
  a.family = AdjustmentFamily::ExpQuadratic;
  a.s = s;
  a.t = t;
  return a;
}

AdjustmentSpec AdjustmentSpec::limit_brutal() {
  AdjustmentSpec a;
  a.family = AdjustmentFamily::LimitBrutal;
  return a;
}

bool AdjustmentSpec::compatible_with(const MarginalSpec& m) const {
  switch (family) {
    case AdjustmentFamily::ExpDecay:
      return m.family == Family::Poisson || m.family == Family::Exponential;
    case AdjustmentFamily::IndicatorThreshold:
    case AdjustmentFamily::LinearCentered:
      return m.family == Family::Binomial;
    case AdjustmentFamily::PhiKernel:
    case AdjustmentFamily::QuadrantIndicator:
    case AdjustmentFamily::ExpQuadratic:
      return m.family == Family::Normal;
    case AdjustmentFamily::LimitBrutal:
      return m.family == Family::Poisson;
  }
  return false;
}

void AdjustmentSpec::require_compatible(const MarginalSpec& m) const {
  if (!compatible_with(m))
    throw std::invalid_argument(describe() + " incompatible with " + m.describe());
  // x0 >= n makes g identically 1 and h identically 0
  if (family == AdjustmentFamily::IndicatorThreshold && x0 >= m.trials)
    throw std::invalid_argument("indicator_threshold: x0 must be below the binomial support end");
}

double AdjustmentSpec::g(double x, const MarginalSpec& m) const {
  switch (family) {
    case AdjustmentFamily::ExpDecay:
      return std::exp(-t * x);
    case AdjustmentFamily::IndicatorThreshold:
      return x <= x0 ? 1.0 : 0.0;
    case AdjustmentFamily::LinearCentered:
      return x / m.trials;
    case AdjustmentFamily::PhiKernel:
      return norm_pdf((x - m.loc) / m.scale);
    case AdjustmentFamily::QuadrantIndicator:
      return x <= m.loc ? 1.0 : 0.0;
    case AdjustmentFamily::ExpQuadratic: {
      const double z = (x - m.loc) / m.scale;
      return std::exp(s * z - 0.5 * t * z * z);
    }
    case AdjustmentFamily::LimitBrutal:
      return x < 0.5 ? 1.0 : 0.0;
  }
  return 0.0;
}

double AdjustmentSpec::center(const MarginalSpec& m) const {
  require_compatible(m);
  switch (family) {
    case AdjustmentFamily::ExpDecay:
      if (m.family == Family::Poisson) {
        const double d = -std::expm1(-t);
        return std::exp(-d * m.theta);
      }
      return m.theta / (m.theta + t);  // exponential
    case AdjustmentFamily::IndicatorThreshold:
      return m.cdf(x0);
    case AdjustmentFamily::LinearCentered:
      return m.prob;
    case AdjustmentFamily::PhiKernel:
      return kInvTwoSqrtPi;
    case AdjustmentFamily::QuadrantIndicator:
      return 0.5;
    case AdjustmentFamily::ExpQuadratic:
      return std::exp(0.5 * s * s / (1.0 + t)) / std::sqrt(1.0 + t);
    case AdjustmentFamily::LimitBrutal:
      return std::exp(-m.theta);
  }
  return 0.0;
}

double AdjustmentSpec::bound(const MarginalSpec& m) const {
  const double a = center(m);
  switch (family) {
    case AdjustmentFamily::ExpDecay:
      if (m.family == Family::Poisson) return std::max(a, 1.0 - a);
      // sup of |exp(-t x) - theta/(theta+t)| over x >= 0 is attained at 0 or
      // in the limit, giving max(t, theta)/(theta+t)
      return std::max(m.theta, t) / (m.theta + t);
    case AdjustmentFamily::IndicatorThreshold:
    case AdjustmentFamily::QuadrantIndicator:
    case AdjustmentFamily::LimitBrutal:
      return std::max(a, 1.0 - a);
    case AdjustmentFamily::LinearCentered:
      return std::max(m.prob, 1.0 - m.prob);
    case AdjustmentFamily::PhiKernel:
      return std::max(a, norm_pdf(0.0) - a);
    case AdjustmentFamily::ExpQuadratic:
      return std::max(a, std::exp(0.5 * s * s / t) - a);
  }
  return 0.0;
}

double AdjustmentSpec::nu(const MarginalSpec& m) const {
  const double a = center(m);
  switch (family) {
    case AdjustmentFamily::ExpDecay:
      if (m.family == Family::Poisson) {
        const double d = -std::expm1(-t);
        return -m.theta * a * d;
      }
      return -t / ((m.theta + t) * (m.theta + t));  // exponential
    case AdjustmentFamily::IndicatorThreshold: {
      const int k = static_cast<int>(x0);
      return binomial_partial_xsum(k, m.trials, m.prob) - m.mean() * a;
    }
    case AdjustmentFamily::LinearCentered:
      return m.prob * (1.0 - m.prob);
    case AdjustmentFamily::PhiKernel:
      return 0.0;
    case AdjustmentFamily::QuadrantIndicator:
      // E X {I(X<=xi) - 1/2} = -sigma*phi(0): nonzero, unlike the phi kernel
      return -m.scale * norm_pdf(0.0);
    case AdjustmentFamily::ExpQuadratic: {
      const double u = 1.0 + t;
      return m.scale * s * std::exp(0.5 * s * s / u) / (u * std::sqrt(u));
    }
    case AdjustmentFamily::LimitBrutal:
      return -m.theta * a;
  }
  return 0.0;
}

double AdjustmentSpec::partial_gf(double y, const MarginalSpec& m) const {
  require_compatible(m);
  switch (family) {
    case AdjustmentFamily::ExpDecay: {
      if (m.family != Family::Exponential)
        throw std::logic_error("partial_gf: discrete marginal");
      if (y <= 0.0) return 0.0;
      const double a = m.theta / (m.theta + t);
      return a * -std::expm1(-(m.theta + t) * y);
    }
    case AdjustmentFamily::PhiKernel: {
      const double z = (y - m.loc) / m.scale;
      return kInvTwoSqrtPi * norm_cdf(z * std::sqrt(2.0));
    }
    case AdjustmentFamily::QuadrantIndicator: {
      const double z = (y - m.loc) / m.scale;
      return norm_cdf(std::min(z, 0.0));
    }
    case AdjustmentFamily::ExpQuadratic: {
      const double z = (y - m.loc) / m.scale;
      const double u = std::sqrt(1.0 + t);
      return center(m) * norm_cdf(u * z - s / u);
    }
    default:
      throw std::logic_error("partial_gf: discrete marginal");
  }
}

std::string AdjustmentSpec::describe() const {
  char buf[96];
  switch (family) {
    case AdjustmentFamily::ExpDecay: std::snprintf(buf, sizeof buf, "ExpDecay(t=%g)", t); break;
    case AdjustmentFamily::IndicatorThreshold:
      std::snprintf(buf, sizeof buf, "IndicatorThreshold(x0=%g)", x0);
      break;
    case AdjustmentFamily::LinearCentered: return "LinearCentered";
    case AdjustmentFamily::PhiKernel: return "PhiKernel";
    case AdjustmentFamily::QuadrantIndicator: return "QuadrantIndicator";
    case AdjustmentFamily::ExpQuadratic:
      std::snprintf(buf, sizeof buf, "ExpQuadratic(s=%g, t=%g)", s, t);
      break;
    case AdjustmentFamily::LimitBrutal: return "LimitBrutal";
  }
  return buf;
}

double nu_approx_indicator(int n, double p, double x0) {
  if (n < 1 || !(p > 0.0 && p < 1.0) || x0 < 0.0 || x0 > n)
    throw std::invalid_argument("nu_approx_indicator: bad arguments");
  const double sigma = std::sqrt(n * p * (1.0 - p));
  return -sigma * norm_pdf((x0 - n * p) / sigma);
}

}  // namespace bivadj
