#include "bivadj/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bivadj/special.hpp"

namespace bivadj {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)

bool is_count(double x) { return x >= 0.0 && x == std::floor(x); }

double require_count(double x, const char* who) {
  if (!is_count(x)) throw std::domain_error(std::string(who) + ": x not a nonnegative integer");
  return x;
}

}  // namespace

MarginalSpec MarginalSpec::poisson(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("poisson: rate must be positive");
  MarginalSpec m;
  m.family = Family::Poisson;
  m.theta = theta;
  return m;
}

MarginalSpec MarginalSpec::binomial(int n, double p) {
  if (n < 1) throw std::invalid_argument("binomial: trials must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("binomial: p must be in (0,1)");
  MarginalSpec m;
  m.family = Family::Binomial;
  m.trials = n;
  m.prob = p;
  return m;
}

MarginalSpec MarginalSpec::normal(double xi, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(xi))
    throw std::invalid_argument("normal: scale must be positive");
  MarginalSpec m;
  m.family = Family::Normal;
  m.loc = xi;
  m.scale = sigma;
  return m;
}

MarginalSpec MarginalSpec::exponential(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("exponential: rate must be positive");
  MarginalSpec m;
  m.family = Family::Exponential;
  m.theta = theta;
  return m;
}

double MarginalSpec::mean() const {
  switch (family) {
    case Family::Poisson: return theta;
    case Family::Binomial: return trials * prob;
    case Family::Normal: return loc;
    case Family::Exponential: return 1.0 / theta;
  }
  return 0.0;
}

double MarginalSpec::sd() const {
  switch (family) {
    case Family::Poisson: return std::sqrt(theta);
    case Family::Binomial: return std::sqrt(trials * prob * (1.0 - prob));
    case Family::Normal: return scale;
    case Family::Exponential: return 1.0 / theta;
  }
  return 0.0;
}

double MarginalSpec::log_pmf_or_pdf(double x) const {
  switch (family) {
    case Family::Poisson: {
      const double k = require_count(x, "poisson pmf");
      return -theta + k * std::log(theta) - std::lgamma(k + 1.0);
    }
    case Family::Binomial: {
      const double k = require_count(x, "binomial pmf");
      if (k > trials) throw std::domain_error("binomial pmf: x > n");
      return log_choose(trials, k) + k * std::log(prob) + (trials - k) * std::log1p(-prob);
    }
    case Family::Normal: {
      const double z = (x - loc) / scale;
      return -0.5 * z * z - kLogSqrt2Pi - std::log(scale);
    }
    case Family::Exponential: {
      if (x < 0.0) throw std::domain_error("exponential pdf: x < 0");
      return std::log(theta) - theta * x;
    }
  }
  return 0.0;
}

double MarginalSpec::pmf_or_pdf(double x) const { return std::exp(log_pmf_or_pdf(x)); }

double MarginalSpec::cdf(double x) const {
  switch (family) {
    case Family::Poisson: {
      if (x < 0.0) return 0.0;
      const int k = static_cast<int>(std::floor(x));
      if (k < theta) {
        // lower sum, terms accumulated downward from k
        const double lb = -theta + k * std::log(theta) - std::lgamma(k + 1.0);
        double ratio_sum = 0.0, r = 1.0;
        for (int j = k; j > 0; --j) {
          r *= j / theta;  // pmf(j-1)/pmf(j)
          ratio_sum += r;
          if (r < 1e-18 * (1.0 + ratio_sum)) break;
        }
        return std::min(1.0, std::exp(lb + std::log1p(ratio_sum)));
      }
      // complement of the upper tail: monotone through the right half
      const double lb = -theta + (k + 1.0) * std::log(theta) - std::lgamma(k + 2.0);
      double ratio_sum = 0.0, r = 1.0;
      const int cap = k + 2000 + static_cast<int>(30.0 * std::sqrt(theta));
      for (int j = k + 2; j < cap; ++j) {
        r *= theta / j;  // pmf(j)/pmf(j-1)
        ratio_sum += r;
        if (r < 1e-18 * (1.0 + ratio_sum)) break;
      }
      return std::max(0.0, 1.0 - std::exp(lb + std::log1p(ratio_sum)));
    }
    case Family::Binomial: {
      if (x < 0.0) return 0.0;
      const int k = static_cast<int>(std::floor(x));
      if (k >= trials) return 1.0;
      const double q = 1.0 - prob;
      if (k < trials * prob) {
        const double lb = log_pmf_or_pdf(static_cast<double>(k));
        double ratio_sum = 0.0, r = 1.0;
        for (int j = k; j > 0; --j) {
          r *= (j * q) / ((trials - j + 1.0) * prob);  // pmf(j-1)/pmf(j)
          ratio_sum += r;
          if (r < 1e-18 * (1.0 + ratio_sum)) break;
        }
        return std::min(1.0, std::exp(lb + std::log1p(ratio_sum)));
      }
      const double lb = log_pmf_or_pdf(static_cast<double>(k + 1));
      double ratio_sum = 0.0, r = 1.0;
      for (int j = k + 1; j < trials; ++j) {
        r *= ((trials - j) * prob) / ((j + 1.0) * q);  // pmf(j+1)/pmf(j)
        ratio_sum += r;
        if (r < 1e-18 * (1.0 + ratio_sum)) break;
      }
      return std::max(0.0, 1.0 - std::exp(lb + std::log1p(ratio_sum)));
    }
    case Family::Normal:
      return norm_cdf((x - loc) / scale);
    case Family::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-theta * x);
  }
  return 0.0;
}

double MarginalSpec::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u outside (0,1)");
  switch (family) {
    case Family::Normal:
      return loc + scale * norm_quantile(u);
    case Family::Exponential:
      return -std::log1p(-u) / theta;
    default:
      throw std::logic_error("quantile: discrete families use table inversion");
  }
}

int MarginalSpec::support_max(double tail_mass) const {
  switch (family) {
    case Family::Binomial:
      return trials;
    case Family::Poisson: {
      const int cap = static_cast<int>(theta + 40.0 * std::sqrt(theta) + 200.0);
      double term = std::exp(-theta);
      double cum = term;
      int k = 0;
      while (1.0 - cum > tail_mass && k < cap) {
        ++k;
        term *= theta / k;
        cum += term;
      }
      return k;
    }
    default:
      throw std::logic_error("support_max: continuous marginal");
  }
}

std::string MarginalSpec::describe() const {
  char buf[96];
  switch (family) {
    case Family::Poisson: std::snprintf(buf, sizeof buf, "Poisson(%g)", theta); break;
    case Family::Binomial: std::snprintf(buf, sizeof buf, "Binomial(%d, %g)", trials, prob); break;
    case Family::Normal: std::snprintf(buf, sizeof buf, "Normal(%g, %g)", loc, scale); break;
    case Family::Exponential: std::snprintf(buf, sizeof buf, "Exponential(%g)", theta); break;
  }
  return buf;
}

}  // namespace bivadj
