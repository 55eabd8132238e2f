#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bivadj/marginals.hpp"
#include "bivadj/special.hpp"

using namespace bivadj;

TEST_CASE("pmf examples") {
  // direct exponentiation oracle vs the log-space path
  CHECK(MarginalSpec::poisson(1.7).pmf_or_pdf(0) ==
        doctest::Approx(std::exp(-1.7)).epsilon(1e-14));
  CHECK(MarginalSpec::poisson(1.7).pmf_or_pdf(0) == doctest::Approx(0.182684).epsilon(1e-5));
  CHECK(MarginalSpec::binomial(2, 0.5).pmf_or_pdf(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(MarginalSpec::normal(0, 1).pmf_or_pdf(0.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("log-space pmf agrees with the direct product where it does not underflow") {
  for (double th : {0.5, 2.0, 8.0}) {
    const auto m = MarginalSpec::poisson(th);
    double direct = std::exp(-th);  // term recurrence, no lgamma
    for (int k = 0; k <= 30; ++k) {
      if (direct > 1e-290)
        CHECK(m.pmf_or_pdf(k) == doctest::Approx(direct).epsilon(1e-10));
      direct *= th / (k + 1);
    }
  }
}

TEST_CASE("discrete cdf equals the summed pmf") {
  for (const auto& m : {MarginalSpec::poisson(2.0125), MarginalSpec::binomial(100, 0.66),
                        MarginalSpec::binomial(20, 0.2)}) {
    double cum = 0.0;
    const int top = m.support_max();
    for (int k = 0; k <= top; ++k) {
      cum += m.pmf_or_pdf(k);
      CHECK(std::abs(m.cdf(k) - std::min(cum, 1.0)) <= 1e-12);
    }
  }
}

TEST_CASE("cdf examples") {
  CHECK(MarginalSpec::binomial(2, 0.5).cdf(1) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(MarginalSpec::poisson(2.0125).cdf(0) ==
        doctest::Approx(std::exp(-2.0125)).epsilon(1e-14));
  CHECK(MarginalSpec::binomial(100, 0.66).cdf(66) ==
        doctest::Approx(0.5375479706593329).epsilon(1e-12));  // brute-force pmf sum
  CHECK(MarginalSpec::binomial(100, 0.66).cdf(100) == 1.0);
  CHECK(MarginalSpec::binomial(100, 0.66).cdf(-1) == 0.0);
  // cross-check the Poisson cdf against the incomplete gamma route
  for (int k : {0, 2, 5, 11})
    CHECK(MarginalSpec::poisson(3.7).cdf(k) ==
          doctest::Approx(gamma_q(k + 1.0, 3.7)).epsilon(1e-13));
  for (int k : {9800, 10000, 10200})  // both tails at a large rate
    CHECK(std::abs(MarginalSpec::poisson(1e4).cdf(k) - gamma_q(k + 1.0, 1e4)) < 1e-11);
}

TEST_CASE("binomial cdf is nondecreasing and hits one at the support end") {
  const auto m = MarginalSpec::binomial(3359, 0.8247);  // largest AuditC group
  double prev = 0.0;
  for (int k = 0; k <= 3359; k += 7) {
    const double v = m.cdf(k);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(m.cdf(3359) == 1.0);
  CHECK(std::isfinite(m.log_pmf_or_pdf(2770)));
}

TEST_CASE("mean and sd closed forms") {
  CHECK(MarginalSpec::poisson(4.0).mean_sd() == std::pair{4.0, 2.0});
  const auto [mb, sb] = MarginalSpec::binomial(100, 0.66).mean_sd();
  CHECK(mb == doctest::Approx(66.0));
  CHECK(sb == doctest::Approx(std::sqrt(22.44)).epsilon(1e-14));
  CHECK(MarginalSpec::exponential(2.0).mean_sd() == std::pair{0.5, 0.5});
  CHECK(MarginalSpec::normal(1.5, 2.5).mean_sd() == std::pair{1.5, 2.5});
}

TEST_CASE("poisson support truncation keeps the tail below the bound") {
  for (double th : {0.5, 1.7, 5.0, 25.0}) {
    const auto m = MarginalSpec::poisson(th);
    const int top = m.support_max(1e-14);
    CHECK(1.0 - m.cdf(top) < 1e-14);
    CHECK(1.0 - m.cdf(top - 1) >= 1e-16);
  }
}

TEST_CASE("parameter and domain errors") {
  CHECK_THROWS_AS(MarginalSpec::poisson(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec::poisson(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec::binomial(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec::binomial(10, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec::normal(0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec::exponential(0.0), std::invalid_argument);

  CHECK_THROWS_AS(MarginalSpec::poisson(1.0).pmf_or_pdf(-1), std::domain_error);
  CHECK_THROWS_AS(MarginalSpec::poisson(1.0).pmf_or_pdf(1.5), std::domain_error);
  CHECK_THROWS_AS(MarginalSpec::binomial(4, 0.5).pmf_or_pdf(5), std::domain_error);
  CHECK_THROWS_AS(MarginalSpec::exponential(1.0).pmf_or_pdf(-0.1), std::domain_error);
}

TEST_CASE("continuous quantiles invert the cdf") {
  const auto nm = MarginalSpec::normal(1.0, 2.0);
  const auto ex = MarginalSpec::exponential(0.5);
  for (double u : {0.01, 0.2, 0.5, 0.9, 0.999}) {
    CHECK(nm.cdf(nm.quantile(u)) == doctest::Approx(u).epsilon(1e-12));
    CHECK(ex.cdf(ex.quantile(u)) == doctest::Approx(u).epsilon(1e-12));
  }
  CHECK_THROWS_AS(MarginalSpec::poisson(1.0).quantile(0.5), std::logic_error);
}
