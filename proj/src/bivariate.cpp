#include "bivadj/bivariate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace bivadj {

double Conditional::pdf(double y) const {
  const double bracket = 1.0 + alpha_h * adj.h(y, marginal);
  return marginal.pmf_or_pdf(y) * std::max(bracket, 0.0);
}

double Conditional::cdf(double y) const {
  if (marginal.discrete()) {
    if (y < 0.0) return 0.0;
    const int k = static_cast<int>(std::floor(y));
    const int top = std::min(k, marginal.support_max());
    double cum = 0.0;
    for (int j = 0; j <= top; ++j) cum += pdf(j);
    return std::min(cum, 1.0);
  }
  // F(y) + alpha_h * (G(y) - a F(y)) with G the partial f*g moment
  const double F = marginal.cdf(y);
  const double G = adj.partial_gf(y, marginal);
  const double a = adj.center(marginal);
  return std::min(1.0, std::max(0.0, F + alpha_h * (G - a * F)));
}

double Conditional::quantile(double u) const {
  if (marginal.discrete()) throw std::logic_error("Conditional::quantile: discrete marginal");
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("Conditional::quantile: u outside (0,1)");
  // bracket the root, then bisect; the cdf is monotone
  double lo, hi;
  if (marginal.family == Family::Exponential) {
    lo = 0.0;
    hi = 50.0 / marginal.theta;
  } else {
    lo = marginal.loc - 12.0 * marginal.scale;
    hi = marginal.loc + 12.0 * marginal.scale;
  }
  for (int i = 0; i < 200 && cdf(hi) < u; ++i) hi += (hi - lo);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BivariateModel::BivariateModel(MarginalSpec m1, AdjustmentSpec adj1, MarginalSpec m2,
                               AdjustmentSpec adj2, double alpha)
    : m1_(m1), m2_(m2), adj1_(adj1), adj2_(adj2), alpha_(alpha) {
  adj1_.require_compatible(m1_);
  adj2_.require_compatible(m2_);
  a1_ = adj1_.center(m1_);
  a2_ = adj2_.center(m2_);
  c1_ = adj1_.bound(m1_);
  c2_ = adj2_.bound(m2_);
  if (!std::isfinite(alpha) || !(std::abs(alpha) < 1.0 / (c1_ * c2_)))
    throw std::invalid_argument("BivariateModel: alpha outside the admissible open range");
}

std::pair<double, double> BivariateModel::alpha_range(const MarginalSpec& m1,
                                                      const AdjustmentSpec& adj1,
                                                      const MarginalSpec& m2,
                                                      const AdjustmentSpec& adj2) {
  adj1.require_compatible(m1);
  adj2.require_compatible(m2);
  const double r = 1.0 / (adj1.bound(m1) * adj2.bound(m2));
  return {-r, r};
}

CorrRange BivariateModel::corr_range(const MarginalSpec& m1, const AdjustmentSpec& adj1,
                                     const MarginalSpec& m2, const AdjustmentSpec& adj2) {
  const auto [lo, hi] = alpha_range(m1, adj1, m2, adj2);
  (void)lo;
  const double peak = hi * std::abs(adj1.nu(m1) * adj2.nu(m2)) / (m1.sd() * m2.sd());
  return {-peak, peak};
}

double BivariateModel::density(double x, double y) const {
  const double f1 = m1_.pmf_or_pdf(x);
  const double f2 = m2_.pmf_or_pdf(y);
  const double bracket = 1.0 + alpha_ * (adj1_.g(x, m1_) - a1_) * (adj2_.g(y, m2_) - a2_);
  if (bracket < -1e-12)
    throw std::runtime_error("BivariateModel::density: negative bracket (invalid model)");
  return f1 * f2 * std::max(bracket, 0.0);
}

Conditional BivariateModel::conditional_given_x(double x) const {
  return Conditional{m2_, adj2_, alpha_ * (adj1_.g(x, m1_) - a1_)};
}

Conditional BivariateModel::conditional_given_y(double y) const {
  return Conditional{m1_, adj1_, alpha_ * (adj2_.g(y, m2_) - a2_)};
}

double BivariateModel::correlation() const {
  return alpha_ * adj1_.nu(m1_) * adj2_.nu(m2_) / (m1_.sd() * m2_.sd());
}

namespace {

// uniform in (0,1), strictly; mt19937_64 keeps the stream portable
inline double next_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// cumulative pmf table over the truncated support; tail mass folded into the
// last entry
std::vector<double> cumulative_table(const MarginalSpec& m) {
  const int top = m.support_max();
  std::vector<double> cum(top + 1);
  double run = 0.0;
  for (int k = 0; k <= top; ++k) {
    run += m.pmf_or_pdf(k);
    cum[k] = run;
  }
  cum[top] = 1.0;
  return cum;
}

std::vector<double> conditional_cumulative(const Conditional& c) {
  const int top = c.marginal.support_max();
  std::vector<double> cum(top + 1);
  double run = 0.0;
  for (int k = 0; k <= top; ++k) {
    run += c.pdf(k);
    cum[k] = run;
  }
  cum[top] = 1.0;
  return cum;
}

inline int invert_table(const std::vector<double>& cum, double u) {
  int k = 0;
  const int top = static_cast<int>(cum.size()) - 1;
  while (k < top && cum[k] < u) ++k;
  return k;
}

}  // namespace

std::vector<std::pair<double, double>> BivariateModel::sample(std::size_t n,
                                                              std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<double, double>> out;
  out.reserve(n);

  std::vector<double> cum1;
  if (m1_.discrete()) cum1 = cumulative_table(m1_);
  std::unordered_map<int, std::vector<double>> cond_cache;  // by x value, discrete m2

  for (std::size_t i = 0; i < n; ++i) {
    const double u1 = next_uniform(rng);
    const double u2 = next_uniform(rng);
    double x;
    if (m1_.discrete()) {
      x = invert_table(cum1, u1);
    } else {
      x = m1_.quantile(u1);
    }
    double y;
    if (m2_.discrete()) {
      std::vector<double>* cum2;
      if (m1_.discrete()) {
        auto [it, fresh] = cond_cache.try_emplace(static_cast<int>(x));
        if (fresh) it->second = conditional_cumulative(conditional_given_x(x));
        cum2 = &it->second;
        y = invert_table(*cum2, u2);
      } else {
        auto table = conditional_cumulative(conditional_given_x(x));
        y = invert_table(table, u2);
      }
    } else {
      y = conditional_given_x(x).quantile(u2);
    }
    out.emplace_back(x, y);
  }
  return out;
}

double binormal_ratio(double x, double y, double rho) {
  if (!(std::abs(rho) < 1.0)) throw std::domain_error("binormal_ratio: |rho| must be < 1");
  const double om = 1.0 - rho * rho;
  return std::exp(rho / om * (x * y - 0.5 * rho * (x * x + y * y))) / std::sqrt(om);
}

}  // namespace bivadj
