#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bivadj/adjustments.hpp"
#include "bivadj/checks.hpp"

using namespace bivadj;

namespace {

const std::vector<std::pair<AdjustmentSpec, MarginalSpec>>& oracle_grid() {
  static const auto* grid = [] {
    auto* g = new std::vector<std::pair<AdjustmentSpec, MarginalSpec>>;
    for (double th : {0.5, 1.0, 1.7, 2.0, 5.0}) {
      for (double t : {0.5, 1.0, 1.084, 2.0}) {
        g->emplace_back(AdjustmentSpec::exp_decay(t), MarginalSpec::poisson(th));
        g->emplace_back(AdjustmentSpec::exp_decay(t), MarginalSpec::exponential(th));
      }
      g->emplace_back(AdjustmentSpec::limit_brutal(), MarginalSpec::poisson(th));
    }
    for (int n : {20, 100}) {
      for (double p : {0.2, 0.5, 0.66}) {
        const auto m = MarginalSpec::binomial(n, p);
        g->emplace_back(AdjustmentSpec::linear_centered(), m);
        for (int x0 = 0; x0 < n; x0 += (n == 20 ? 1 : 7))
          g->emplace_back(AdjustmentSpec::indicator_threshold(x0), m);
      }
    }
    for (const auto& m : {MarginalSpec::normal(0, 1), MarginalSpec::normal(0.5, 2)}) {
      g->emplace_back(AdjustmentSpec::phi_kernel(), m);
      g->emplace_back(AdjustmentSpec::quadrant_indicator(), m);
      for (double s : {0.0, 1.0})
        for (double t : {0.5, 1.0}) g->emplace_back(AdjustmentSpec::exp_quadratic(s, t), m);
    }
    return g;
  }();
  return *grid;
}

}  // namespace

TEST_CASE("center examples") {
  CHECK(AdjustmentSpec::exp_decay(1).center(MarginalSpec::poisson(1.7)) ==
        doctest::Approx(0.34143261161204636).epsilon(1e-12));
  CHECK(AdjustmentSpec::phi_kernel().center(MarginalSpec::normal(0, 1)) ==
        doctest::Approx(0.2820947917738781).epsilon(1e-12));
  CHECK(AdjustmentSpec::exp_decay(2).center(MarginalSpec::exponential(1)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(AdjustmentSpec::limit_brutal().center(MarginalSpec::poisson(2.0)) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("bound examples") {
  // a = 1/2 at theta = log2/d gives c = 1/2 and an alpha range of 4 per axis
  const double d = -std::expm1(-1.0);
  const auto m = MarginalSpec::poisson(std::log(2.0) / d);
  CHECK(AdjustmentSpec::exp_decay(1).bound(m) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(AdjustmentSpec::indicator_threshold(1).bound(MarginalSpec::binomial(2, 0.5)) ==
        doctest::Approx(0.75).epsilon(1e-14));
  CHECK(AdjustmentSpec::exp_decay(2).bound(MarginalSpec::exponential(1)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("nu examples") {
  CHECK(AdjustmentSpec::exp_decay(1).nu(MarginalSpec::poisson(1.7)) ==
        doctest::Approx(-0.3669051745326511).epsilon(1e-12));
  CHECK(AdjustmentSpec::phi_kernel().nu(MarginalSpec::normal(0, 1)) == 0.0);
  CHECK(AdjustmentSpec::exp_quadratic(1, 1).nu(MarginalSpec::normal(0, 1)) ==
        doctest::Approx(0.45397153967789217).epsilon(1e-12));
}

TEST_CASE("nu_approx_indicator examples") {
  CHECK(nu_approx_indicator(100, 0.66, 66) ==
        doctest::Approx(-1.8898245746582227).epsilon(1e-12));
  CHECK(std::abs(nu_approx_indicator(100, 0.5, 0)) < 1e-10);
  CHECK(nu_approx_indicator(400, 0.5, 200) == doctest::Approx(-3.989422804014327).epsilon(1e-12));
  // the exact finite sum is within 5% of the approximation at n = 100
  const double exact = AdjustmentSpec::indicator_threshold(66).nu(MarginalSpec::binomial(100, 0.66));
  CHECK(exact == doctest::Approx(-1.884389340917238).epsilon(1e-12));
  CHECK(std::abs(exact - nu_approx_indicator(100, 0.66, 66)) / std::abs(exact) < 0.05);
}

TEST_CASE("oracle equivalence of closed-form center and nu") {
  for (const auto& [adj, m] : oracle_grid()) {
    CAPTURE(adj.describe());
    CAPTURE(m.describe());
    CHECK(adj.center(m) == doctest::Approx(checks::bf_center(adj, m)).epsilon(1e-8));
    CHECK(std::abs(adj.nu(m) - checks::bf_nu(adj, m)) < 1e-8);
  }
}

TEST_CASE("centered function has mean zero and the bound is attained") {
  for (const auto& [adj, m] : oracle_grid()) {
    CAPTURE(adj.describe());
    CAPTURE(m.describe());
    const double a = adj.center(m);
    const double c = adj.bound(m);
    // mean-zero via the brute-force center
    CHECK(std::abs(checks::bf_center(adj, m) - a) < 1e-10);
    const double sup = checks::bf_bound(adj, m, 1000001);
    CHECK(sup <= c + 1e-12);
    CHECK(sup >= c - 1e-9);  // attained on the truncated support / grid
  }
}

TEST_CASE("rescaling g by k scales c by k, nu by k and the alpha range by 1/k^2") {
  const double k = 3.0;
  const auto adj = AdjustmentSpec::exp_decay(1.0);
  const auto m = MarginalSpec::poisson(1.7);
  // brute-force quantities of the scaled function k*g
  const int top = m.support_max();
  double a_scaled = 0.0;
  for (int x = 0; x <= top; ++x) a_scaled += m.pmf_or_pdf(x) * k * adj.g(x, m);
  double c_scaled = 0.0, nu_scaled = 0.0;
  for (int x = 0; x <= top; ++x) {
    c_scaled = std::max(c_scaled, std::abs(k * adj.g(x, m) - a_scaled));
    nu_scaled += x * m.pmf_or_pdf(x) * (k * adj.g(x, m) - a_scaled);
  }
  CHECK(a_scaled == doctest::Approx(k * adj.center(m)).epsilon(1e-10));
  CHECK(c_scaled == doctest::Approx(k * adj.bound(m)).epsilon(1e-8));
  CHECK(nu_scaled == doctest::Approx(k * adj.nu(m)).epsilon(1e-8));
  // admissible range shrinks by k^2 when both axes rescale
  const double range = 1.0 / (adj.bound(m) * adj.bound(m));
  const double range_scaled = 1.0 / (c_scaled * c_scaled);
  CHECK(range_scaled == doctest::Approx(range / (k * k)).epsilon(1e-8));
}

TEST_CASE("linear-centered correlation bound shrinks with n") {
  auto max_corr = [](int n) {
    const auto m = MarginalSpec::binomial(n, 0.5);
    const auto adj = AdjustmentSpec::linear_centered();
    const double c = adj.bound(m);
    return (1.0 / (c * c)) * adj.nu(m) * adj.nu(m) / (m.sd() * m.sd());
  };
  CHECK(max_corr(400) < max_corr(100));
  CHECK(max_corr(100) < max_corr(25));
}

TEST_CASE("incompatible pairings are rejected") {
  CHECK_THROWS_AS(AdjustmentSpec::exp_decay(1).center(MarginalSpec::binomial(10, 0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdjustmentSpec::indicator_threshold(1).center(MarginalSpec::poisson(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdjustmentSpec::phi_kernel().center(MarginalSpec::exponential(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdjustmentSpec::limit_brutal().center(MarginalSpec::normal(0, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdjustmentSpec::indicator_threshold(30).center(MarginalSpec::binomial(10, 0.5)),
                  std::invalid_argument);
  // the threshold at the support end is degenerate (h identically zero)
  CHECK_THROWS_AS(AdjustmentSpec::indicator_threshold(10).center(MarginalSpec::binomial(10, 0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdjustmentSpec::exp_decay(0.0), std::invalid_argument);
  CHECK_THROWS_AS(AdjustmentSpec::exp_quadratic(1.0, 0.0), std::invalid_argument);
}
