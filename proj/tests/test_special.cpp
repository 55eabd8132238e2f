#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bivadj/special.hpp"

using namespace bivadj;

TEST_CASE("normal cdf against erf identities") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(norm_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
  CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
}

TEST_CASE("normal quantile inverts the cdf to machine precision") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(1e-12, 1.0 - 1e-12);
  for (int i = 0; i < 2000; ++i) {
    const double p = unif(rng);
    const double z = norm_quantile(p);
    CHECK(norm_cdf(z) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(norm_quantile(norm_cdf(-30.0)) == doctest::Approx(-30.0).epsilon(1e-10));
  CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(norm_quantile(1.0), std::domain_error);
}

TEST_CASE("chi1 cdf values and monotonicity") {
  CHECK(chi1_cdf(0.0) == 0.0);
  CHECK(chi1_cdf(3.8415) == doctest::Approx(0.95).epsilon(1e-4));
  CHECK(chi1_cdf(2.7055) == doctest::Approx(0.90).epsilon(1e-4));
  CHECK_THROWS_AS(chi1_cdf(-1e-9), std::domain_error);

  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = chi1_cdf(40.0 * i / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(chi1_cdf(40.0) > 1.0 - 1e-9);
}

TEST_CASE("chi1 quantile round trip") {
  for (double p : {0.1, 0.5, 0.9, 0.95, 0.99}) {
    CHECK(chi1_cdf(chi1_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(chi1_quantile(0.95) == doctest::Approx(3.841458820694124).epsilon(1e-10));
}

TEST_CASE("incomplete gamma against the Poisson cdf identity") {
  // P(Pois(th) <= k) = Q(k+1, th)
  auto pois_cdf = [](int k, double th) {
    double term = std::exp(-th), cum = term;
    for (int j = 1; j <= k; ++j) {
      term *= th / j;
      cum += term;
    }
    return cum;
  };
  for (double th : {0.5, 2.0, 10.0, 40.0}) {
    for (int k : {0, 1, 5, 20, 60}) {
      CHECK(gamma_q(k + 1.0, th) == doctest::Approx(pois_cdf(k, th)).epsilon(1e-12));
    }
  }
  CHECK(gamma_p(0.5, 1e10) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_p(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(gamma_p(-1.0, 1.0), std::domain_error);
}

TEST_CASE("chi-square cdf reduces to chi1 for one degree of freedom") {
  for (double x : {0.1, 1.0, 3.84, 10.0})
    CHECK(chisq_cdf(1.0, x) == doctest::Approx(chi1_cdf(x)).epsilon(1e-12));
  CHECK(chisq_cdf(4.0, 9.487729036781154) == doctest::Approx(0.95).epsilon(1e-10));
}

TEST_CASE("log_choose matches direct binomial coefficients") {
  CHECK(std::exp(log_choose(10, 3)) == doctest::Approx(120.0).epsilon(1e-12));
  CHECK(std::exp(log_choose(2, 1)) == doctest::Approx(2.0).epsilon(1e-12));
  // no overflow at the largest AuditC size
  CHECK(std::isfinite(log_choose(3359, 2770)));
}
