#include "bivadj/checks.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bivadj/kernels.hpp"

namespace bivadj::checks {

namespace {

// 20-point Gauss-Legendre nodes/weights on [-1,1], Newton on the Legendre
// recurrence; computed once
struct GaussLegendre {
  std::vector<double> node, weight;
  GaussLegendre() {
    constexpr int n = 20;
    node.resize(n);
    weight.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      node[i] = -z;
      node[n - 1 - i] = z;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }
};

const GaussLegendre& gl20() {
  static const GaussLegendre g;
  return g;
}

bool discrete(const MarginalSpec& m) { return m.discrete(); }

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, int panels) {
  const auto& g = gl20();
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double mid = a + 0.5 * h;
    double acc = 0.0;
    for (std::size_t k = 0; k < g.node.size(); ++k)
      acc += g.weight[k] * f(mid + 0.5 * h * g.node[k]);
    total += 0.5 * h * acc;
  }
  return total;
}

std::pair<double, double> integration_range(const MarginalSpec& m) {
  switch (m.family) {
    case Family::Normal:
      return {m.loc - 10.0 * m.scale, m.loc + 10.0 * m.scale};
    case Family::Exponential:
      return {0.0, 40.0 / m.theta};
    default:
      throw std::logic_error("integration_range: continuous marginal expected");
  }
}

double bf_center(const AdjustmentSpec& adj, const MarginalSpec& m) {
  if (discrete(m)) {
    const int top = m.support_max();
    double acc = 0.0;
    for (int k = 0; k <= top; ++k) acc += m.pmf_or_pdf(k) * adj.g(k, m);
    return acc;
  }
  const auto [lo, hi] = integration_range(m);
  return integrate([&](double x) { return m.pmf_or_pdf(x) * adj.g(x, m); }, lo, hi);
}

double bf_nu(const AdjustmentSpec& adj, const MarginalSpec& m) {
  const double a = bf_center(adj, m);
  if (discrete(m)) {
    const int top = m.support_max();
    double acc = 0.0;
    for (int k = 0; k <= top; ++k) acc += k * m.pmf_or_pdf(k) * (adj.g(k, m) - a);
    return acc;
  }
  const auto [lo, hi] = integration_range(m);
  return integrate([&](double x) { return x * m.pmf_or_pdf(x) * (adj.g(x, m) - a); }, lo, hi);
}

double bf_bound(const AdjustmentSpec& adj, const MarginalSpec& m, int grid_points) {
  const double a = bf_center(adj, m);
  if (discrete(m)) {
    // the sup of |g - a| can sit past the mass truncation point (exp-decay g
    // approaches its infimum slowly), so scan the Poisson support further out
    int top = m.support_max();
    if (m.family == Family::Poisson) top = std::max(top, 4000);
    double best = 0.0;
    for (int k = 0; k <= top; ++k) best = std::max(best, std::abs(adj.g(k, m) - a));
    return best;
  }
  auto [lo, hi] = integration_range(m);
  if (m.family == Family::Exponential) {
    hi = 50.0 / m.theta;
    if (adj.family == AdjustmentFamily::ExpDecay) hi = std::max(hi, 40.0 / adj.t);
  }
  std::vector<double> vals(grid_points);
  for (int i = 0; i < grid_points; ++i)
    vals[i] = adj.g(lo + (hi - lo) * i / (grid_points - 1.0), m);
  return kernels::max_abs_dev(vals, a);
}

double bf_correlation(const BivariateModel& model) {
  const MarginalSpec& m1 = model.m1();
  const MarginalSpec& m2 = model.m2();
  if (!discrete(m1) || !discrete(m2))
    throw std::logic_error("bf_correlation: discrete marginals only");
  const int t1 = m1.support_max();
  const int t2 = m2.support_max();
  double sxy = 0.0;
  for (int x = 0; x <= t1; ++x)
    for (int y = 0; y <= t2; ++y) sxy += x * y * model.density(x, y);
  return (sxy - m1.mean() * m2.mean()) / (m1.sd() * m2.sd());
}

double marginalization_error(const BivariateModel& model) {
  double worst = 0.0;
  const MarginalSpec& m1 = model.m1();
  const MarginalSpec& m2 = model.m2();

  auto row_mass = [&](double x) {
    if (m2.discrete()) {
      const int t2 = m2.support_max();
      double acc = 0.0;
      for (int y = 0; y <= t2; ++y) acc += model.density(x, y);
      return acc;
    }
    const auto [lo, hi] = integration_range(m2);
    return integrate([&](double y) { return model.density(x, y); }, lo, hi, 400);
  };
  auto col_mass = [&](double y) {
    if (m1.discrete()) {
      const int t1 = m1.support_max();
      double acc = 0.0;
      for (int x = 0; x <= t1; ++x) acc += model.density(x, y);
      return acc;
    }
    const auto [lo, hi] = integration_range(m1);
    return integrate([&](double x) { return model.density(x, y); }, lo, hi, 400);
  };

  if (m1.discrete()) {
    for (int x = 0; x <= m1.support_max(); ++x)
      worst = std::max(worst, std::abs(row_mass(x) - m1.pmf_or_pdf(x)));
  } else {
    const auto [lo, hi] = integration_range(m1);
    for (int i = 0; i <= 40; ++i) {
      const double x = lo + (hi - lo) * i / 40.0;
      worst = std::max(worst, std::abs(row_mass(x) - m1.pmf_or_pdf(x)));
    }
  }
  if (m2.discrete()) {
    for (int y = 0; y <= m2.support_max(); ++y)
      worst = std::max(worst, std::abs(col_mass(y) - m2.pmf_or_pdf(y)));
  } else {
    const auto [lo, hi] = integration_range(m2);
    for (int i = 0; i <= 40; ++i) {
      const double y = lo + (hi - lo) * i / 40.0;
      worst = std::max(worst, std::abs(col_mass(y) - m2.pmf_or_pdf(y)));
    }
  }
  return worst;
}

}  // namespace bivadj::checks
