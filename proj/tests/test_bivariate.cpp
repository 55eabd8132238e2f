#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bivadj/bivariate.hpp"
#include "bivadj/checks.hpp"
#include "bivadj/special.hpp"
#include "test_support.hpp"

using namespace bivadj;

namespace {
const AdjustmentSpec kExpDecay1 = AdjustmentSpec::exp_decay(1.0);
}

TEST_CASE("alpha range examples") {
  const double d = -std::expm1(-1.0);
  const auto m_half = MarginalSpec::poisson(std::log(2.0) / d);  // a = 1/2
  const auto r1 = BivariateModel::alpha_range(m_half, kExpDecay1, m_half, kExpDecay1);
  CHECK(r1.second == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(r1.first == doctest::Approx(-4.0).epsilon(1e-10));

  const auto mn = MarginalSpec::normal(0, 1);
  const auto r2 = BivariateModel::alpha_range(mn, AdjustmentSpec::phi_kernel(), mn,
                                              AdjustmentSpec::phi_kernel());
  CHECK(r2.second == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
  CHECK(r2.second == doctest::Approx(12.566).epsilon(1e-4));

  const auto r3 = BivariateModel::alpha_range(mn, AdjustmentSpec::quadrant_indicator(), mn,
                                              AdjustmentSpec::quadrant_indicator());
  CHECK(r3.second == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("density at alpha zero factorizes") {
  const BivariateModel m(MarginalSpec::poisson(1.7), kExpDecay1, MarginalSpec::poisson(2.0125),
                         kExpDecay1, 0.0);
  for (int x = 0; x <= 8; ++x)
    for (int y = 0; y <= 8; ++y)
      CHECK(m.density(x, y) == doctest::Approx(m.m1().pmf_or_pdf(x) * m.m2().pmf_or_pdf(y))
                                   .epsilon(1e-14));
}

TEST_CASE("seeds cell (0,0) density matches the closed-form bracket") {
  const double d = -std::expm1(-1.0);
  const double a1 = std::exp(-d * 1.591), a2 = std::exp(-d * 2.012);
  const BivariateModel m(MarginalSpec::poisson(1.591), kExpDecay1, MarginalSpec::poisson(2.012),
                         kExpDecay1, -0.836);
  const double want =
      std::exp(-1.591) * std::exp(-2.012) * (1.0 - 0.836 * (1.0 - a1) * (1.0 - a2));
  CHECK(m.density(0, 0) == doctest::Approx(want).epsilon(1e-14));
  // 958 times the (0,0) mass reproduces the expected-table cell near 16.1
  CHECK(958.0 * m.density(0, 0) == doctest::Approx(16.1).epsilon(0.01));
}

TEST_CASE("limit-brutal density has the four-region closed form") {
  const double th1 = 1.7, th2 = 2.0125, alpha = -0.9;
  const BivariateModel m(MarginalSpec::poisson(th1), AdjustmentSpec::limit_brutal(),
                         MarginalSpec::poisson(th2), AdjustmentSpec::limit_brutal(), alpha);
  const double e1 = std::exp(-th1), e2 = std::exp(-th2);
  const auto f1 = MarginalSpec::poisson(th1);
  const auto f2 = MarginalSpec::poisson(th2);
  for (int x = 0; x <= 10; ++x) {
    for (int y = 0; y <= 10; ++y) {
      double bracket;
      if (x == 0 && y == 0)
        bracket = 1.0 + alpha * (1.0 - e1) * (1.0 - e2);
      else if (x == 0)
        bracket = 1.0 - alpha * (1.0 - e1) * e2;
      else if (y == 0)
        bracket = 1.0 - alpha * e1 * (1.0 - e2);
      else
        bracket = 1.0 + alpha * e1 * e2;
      CHECK(m.density(x, y) ==
            doctest::Approx(f1.pmf_or_pdf(x) * f2.pmf_or_pdf(y) * bracket).epsilon(1e-13));
    }
  }
}

TEST_CASE("marginal preservation at near-endpoint alpha for every family pairing") {
  struct Combo {
    MarginalSpec m1, m2;
    AdjustmentSpec a1, a2;
  };
  const std::vector<Combo> combos = {
      {MarginalSpec::poisson(1.7), MarginalSpec::poisson(2.0125), kExpDecay1, kExpDecay1},
      {MarginalSpec::poisson(1.7), MarginalSpec::poisson(2.0125), AdjustmentSpec::limit_brutal(),
       AdjustmentSpec::limit_brutal()},
      {MarginalSpec::binomial(100, 0.66), MarginalSpec::binomial(100, 0.66),
       AdjustmentSpec::indicator_threshold(66), AdjustmentSpec::indicator_threshold(66)},
      {MarginalSpec::binomial(20, 0.35), MarginalSpec::binomial(40, 0.6),
       AdjustmentSpec::linear_centered(), AdjustmentSpec::linear_centered()},
      {MarginalSpec::normal(0, 1), MarginalSpec::normal(0, 1), AdjustmentSpec::phi_kernel(),
       AdjustmentSpec::phi_kernel()},
      {MarginalSpec::normal(0.5, 2), MarginalSpec::normal(0, 1),
       AdjustmentSpec::quadrant_indicator(), AdjustmentSpec::quadrant_indicator()},
      {MarginalSpec::normal(0, 1), MarginalSpec::normal(0, 1), AdjustmentSpec::exp_quadratic(1, 1),
       AdjustmentSpec::exp_quadratic(1, 1)},
      {MarginalSpec::exponential(1.0), MarginalSpec::exponential(2.0),
       AdjustmentSpec::exp_decay(2.0), kExpDecay1},
      {MarginalSpec::poisson(2.0), MarginalSpec::binomial(100, 0.66), kExpDecay1,
       AdjustmentSpec::indicator_threshold(66)},
  };
  for (const auto& co : combos) {
    const auto range = BivariateModel::alpha_range(co.m1, co.a1, co.m2, co.a2);
    for (double frac : {-1.0 + 1e-6, -0.5, -0.1, 0.1, 0.5, 1.0 - 1e-6}) {
      CAPTURE(co.a1.describe());
      CAPTURE(co.m1.describe());
      CAPTURE(frac);
      const BivariateModel model(co.m1, co.a1, co.m2, co.a2, frac * range.second);
      CHECK(checks::marginalization_error(model) < 1e-10);
    }
  }
}

TEST_CASE("density stays nonnegative across the support at endpoint alpha") {
  const auto m1 = MarginalSpec::poisson(1.7);
  const auto m2 = MarginalSpec::poisson(2.0125);
  const auto range = BivariateModel::alpha_range(m1, kExpDecay1, m2, kExpDecay1);
  for (double alpha : {range.first * (1.0 - 1e-9), range.second * (1.0 - 1e-9)}) {
    const BivariateModel m(m1, kExpDecay1, m2, kExpDecay1, alpha);
    double least = 1e300;
    for (int x = 0; x <= m1.support_max(); ++x)
      for (int y = 0; y <= m2.support_max(); ++y) least = std::min(least, m.density(x, y));
    CHECK(least >= 0.0);
  }
}

TEST_CASE("boundary alpha is rejected, interior accepted") {
  const auto m1 = MarginalSpec::poisson(1.7);
  const auto range = BivariateModel::alpha_range(m1, kExpDecay1, m1, kExpDecay1);
  CHECK_THROWS_AS(BivariateModel(m1, kExpDecay1, m1, kExpDecay1, range.second),
                  std::invalid_argument);
  CHECK_THROWS_AS(BivariateModel(m1, kExpDecay1, m1, kExpDecay1, range.second + 1.0),
                  std::invalid_argument);
  CHECK_NOTHROW(BivariateModel(m1, kExpDecay1, m1, kExpDecay1, range.second * 0.999));
}

TEST_CASE("conditional is a proper density and factorizes the joint") {
  const BivariateModel m(MarginalSpec::poisson(1.591), kExpDecay1, MarginalSpec::poisson(2.012),
                         kExpDecay1, -0.836);
  for (int x : {0, 1, 3, 7}) {
    const Conditional c = m.conditional_given_x(x);
    double total = 0.0;
    for (int y = 0; y <= m.m2().support_max(); ++y) {
      total += c.pdf(y);
      CHECK(m.density(x, y) ==
            doctest::Approx(m.m1().pmf_or_pdf(x) * c.pdf(y)).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
  // alpha = 0: conditional equals the plain marginal
  const BivariateModel ind(MarginalSpec::poisson(1.591), kExpDecay1, MarginalSpec::poisson(2.012),
                           kExpDecay1, 0.0);
  const Conditional c0 = ind.conditional_given_x(2);
  for (int y = 0; y <= 12; ++y)
    CHECK(c0.pdf(y) == doctest::Approx(ind.m2().pmf_or_pdf(y)).epsilon(1e-14));
}

TEST_CASE("continuous conditional integrates to one and matches its cdf") {
  const auto mn = MarginalSpec::normal(0, 1);
  const auto phi = AdjustmentSpec::phi_kernel();
  const BivariateModel m(mn, phi, mn, phi, 6.0);
  const Conditional c = m.conditional_given_x(0.4);
  const double total = checks::integrate([&](double y) { return c.pdf(y); }, -10, 10, 400);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  for (double y : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
    const double direct = checks::integrate([&](double u) { return c.pdf(u); }, -10, y, 400);
    CHECK(c.cdf(y) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("conditional variance of the phi-kernel model matches the closed form") {
  const auto mn = MarginalSpec::normal(0, 1);
  const auto phi = AdjustmentSpec::phi_kernel();
  const double alpha = 6.0;
  const BivariateModel m(mn, phi, mn, phi, alpha);
  const double a = phi.center(mn);
  auto var_quad = [&](double x) {
    const Conditional c = m.conditional_given_x(x);
    const double m1 = checks::integrate([&](double y) { return y * c.pdf(y); }, -10, 10, 400);
    const double m2 = checks::integrate([&](double y) { return y * y * c.pdf(y); }, -10, 10, 400);
    return m2 - m1 * m1;
  };
  for (double x : {0.0, 0.5, 1.0, 2.0}) {
    const double closed = 1.0 - 0.5 * alpha * a * (norm_pdf(x) - a);
    CHECK(var_quad(x) == doctest::Approx(closed).epsilon(1e-6));
  }
  // the sign of Var(Y|x) - 1 flips at |x| = sqrt(log 2) = 0.8326
  const double x0 = std::sqrt(std::log(2.0));
  CHECK(var_quad(x0 - 0.05) < 1.0);
  CHECK(var_quad(x0 + 0.05) > 1.0);
  CHECK(std::abs(var_quad(x0) - 1.0) < 1e-6);
}

TEST_CASE("correlation formula against brute-force sums") {
  const BivariateModel pois(MarginalSpec::poisson(2.0), kExpDecay1, MarginalSpec::poisson(2.0),
                            kExpDecay1, 1.0);
  // alpha sqrt(th1 th2) a1 a2 d^2 at theta = 2, t = 1
  const double d = -std::expm1(-1.0);
  const double a = std::exp(-2.0 * d);
  CHECK(pois.correlation() == doctest::Approx(2.0 * a * a * d * d).epsilon(1e-12));
  CHECK(pois.correlation() == doctest::Approx(checks::bf_correlation(pois)).epsilon(1e-8));

  const BivariateModel bino(MarginalSpec::binomial(100, 0.66),
                            AdjustmentSpec::indicator_threshold(66),
                            MarginalSpec::binomial(100, 0.66),
                            AdjustmentSpec::indicator_threshold(66), -1.73);
  CHECK(bino.correlation() == doctest::Approx(checks::bf_correlation(bino)).epsilon(1e-8));
  // thresholds at the means: correlation close to alpha/(2 pi)
  CHECK(bino.correlation() == doctest::Approx(-1.73 / (2.0 * M_PI)).epsilon(0.02));

  const BivariateModel mixed(MarginalSpec::poisson(2.0), kExpDecay1,
                             MarginalSpec::binomial(100, 0.66),
                             AdjustmentSpec::indicator_threshold(66), 1.2);
  CHECK(mixed.correlation() == doctest::Approx(checks::bf_correlation(mixed)).epsilon(1e-8));
}

TEST_CASE("correlation is linear in alpha and capped by the range") {
  const auto m1 = MarginalSpec::poisson(1.7);
  const auto m2 = MarginalSpec::poisson(2.0125);
  const auto range = BivariateModel::alpha_range(m1, kExpDecay1, m2, kExpDecay1);
  const auto cr = BivariateModel::corr_range(m1, kExpDecay1, m2, kExpDecay1);
  CHECK(cr.lo == -cr.hi);
  const BivariateModel half(m1, kExpDecay1, m2, kExpDecay1, 0.5 * range.second);
  CHECK(std::abs(half.correlation()) == doctest::Approx(0.5 * cr.hi).epsilon(1e-12));
  const BivariateModel zero(m1, kExpDecay1, m2, kExpDecay1, 0.0);
  CHECK(zero.correlation() == 0.0);
}

TEST_CASE("corr range reaches the published values") {
  const auto mn = MarginalSpec::normal(0, 1);
  const auto eq = AdjustmentSpec::exp_quadratic(1, 1);
  CHECK(BivariateModel::corr_range(mn, eq, mn, eq).hi == doctest::Approx(0.25).epsilon(1e-6));
  const int n = 1000000;
  const auto mb = MarginalSpec::binomial(n, 0.5);
  const auto ind = AdjustmentSpec::indicator_threshold(n / 2);
  CHECK(BivariateModel::corr_range(mb, ind, mb, ind).hi == doctest::Approx(0.636).epsilon(0.0032));
}

TEST_CASE("sampling is deterministic per seed") {
  const BivariateModel m(MarginalSpec::poisson(1.591), kExpDecay1, MarginalSpec::poisson(2.012),
                         kExpDecay1, -0.836);
  CHECK(m.sample(500, 42) == m.sample(500, 42));
  CHECK(m.sample(500, 42) != m.sample(500, 43));
}

TEST_CASE("independent samples pass a chi-square independence test") {
  const BivariateModel m(MarginalSpec::poisson(1.7), kExpDecay1, MarginalSpec::poisson(2.0125),
                         kExpDecay1, 0.0);
  const auto sample = testsupport::to_pair_sample(m.sample(100000, 2026), "indep");
  CHECK(testsupport::independence_chisq_pvalue(sample, 7, 7) > 0.01);
}

TEST_CASE("binomial sampler reproduces the model correlation") {
  const BivariateModel m(MarginalSpec::binomial(100, 0.66),
                         AdjustmentSpec::indicator_threshold(66),
                         MarginalSpec::binomial(100, 0.66),
                         AdjustmentSpec::indicator_threshold(66), -1.73);
  const auto sample = testsupport::to_pair_sample(m.sample(100000, 99), "binom");
  const auto s = summary(sample);
  CHECK(std::abs(s.pearson - m.correlation()) < 0.01);
}

TEST_CASE("poisson sampler cell frequencies match the density within 3 mc errors") {
  const BivariateModel m(MarginalSpec::poisson(1.591), kExpDecay1, MarginalSpec::poisson(2.012),
                         kExpDecay1, -0.836);
  const std::size_t n = 1000000;
  const auto draws = m.sample(n, 31);
  std::vector<std::vector<double>> freq(12, std::vector<double>(12, 0.0));
  for (const auto& [x, y] : draws)
    if (x < 12 && y < 12) freq[static_cast<int>(x)][static_cast<int>(y)] += 1.0;
  int checked = 0;
  for (int x = 0; x < 12; ++x) {
    for (int y = 0; y < 12; ++y) {
      const double p = m.density(x, y);
      if (p < 1e-5) continue;
      const double se = std::sqrt(p * (1.0 - p) / n);
      CHECK(std::abs(freq[x][y] / n - p) < 3.0 * se);
      ++checked;
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("continuous sampling matches the marginals") {
  const auto mn = MarginalSpec::normal(0, 1);
  const auto phi = AdjustmentSpec::phi_kernel();
  const BivariateModel m(mn, phi, mn, phi, 10.0);
  const auto draws = m.sample(20000, 5);
  double sy = 0.0, syy = 0.0;
  for (const auto& [x, y] : draws) {
    (void)x;
    sy += y;
    syy += y * y;
  }
  const double mean = sy / draws.size();
  const double var = syy / draws.size() - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("binormal ratio closed form and expansion") {
  CHECK(binormal_ratio(0.7, -1.2, 0.0) == 1.0);
  CHECK(binormal_ratio(0.0, 0.0, 0.1) == doctest::Approx(1.005037815259212).epsilon(1e-12));
  CHECK_THROWS_AS(binormal_ratio(0, 0, 1.0), std::domain_error);
  // |ratio - (1 + rho x y)| <= C rho^2 with a stable C on [-2,2]^2
  double cmin = 1e300, cmax = 0.0;
  for (double rho : {0.01, 0.02, 0.05}) {
    double worst = 0.0;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j)
        worst = std::max(worst, std::abs(binormal_ratio(0.2 * i, 0.2 * j, rho) -
                                         (1.0 + rho * 0.2 * i * 0.2 * j)) /
                                    (rho * rho));
    cmin = std::min(cmin, worst);
    cmax = std::max(cmax, worst);
  }
  CHECK(cmax < 6.0);
  CHECK(cmax / cmin < 1.2);
}
