#include "bivadj/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bivadj/checks.hpp"
#include "bivadj/datasets.hpp"
#include "bivadj/gof.hpp"
#include "bivadj/inference.hpp"
#include "bivadj/special.hpp"

namespace bivadj::report {

namespace {

using Clock = std::chrono::steady_clock;

struct Builder {
  std::vector<TargetRow>& rows;
  int criterion;
  double seconds = 0.0;

  void add(const std::string& id, double observed, double target, double tol,
           bool expected_fail = false, bool informational = false, const std::string& note = "") {
    TargetRow r;
    r.criterion = criterion;
    r.id = id;
    r.observed = observed;
    r.target = target;
    r.tol = tol;
    r.pass = std::abs(observed - target) <= tol + 1e-12;
    r.expected_fail = expected_fail;
    r.informational = informational;
    r.note = note;
    r.seconds = seconds;
    rows.push_back(std::move(r));
  }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1.0);
  return g;
}

std::vector<double> logspace(double lo, double hi, int n) {
  auto g = linspace(std::log(lo), std::log(hi), n);
  for (double& v : g) v = std::exp(v);
  return g;
}

constexpr const char* kSeedsNote = "published seeds optimum is not a maximum of its own likelihood";

// ---------------------------------------------------------------------- 1, 2
void criteria_1_2(std::vector<TargetRow>& rows, const Options& opt, bool run1, bool run2) {
  const auto t0 = Clock::now();
  const PairSample seeds = seeds_plants();
  ModelConfig cfg;
  cfg.kind = ModelKind::Poisson3;
  cfg.t = 1.0;
  const FitResult f = fit(cfg, seeds);
  const auto s = summary(seeds);
  const double gain = f.loglik_max - loglik_independent_poisson(seeds, s.mean_x, s.mean_y);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  if (run1) {
    Builder b{rows, 1, secs};
    b.add("theta1", f.estimate("theta1"), 1.591, 0.005, true, false, kSeedsNote);
    b.add("theta2", f.estimate("theta2"), 2.012, 0.005);
    b.add("alpha", f.estimate("alpha"), -0.836, 0.01, true, false, kSeedsNote);
    b.add("se.theta1", f.se[0], 0.045, 0.005);
    b.add("se.theta2", f.se[1], 0.046, 0.005);
    b.add("se.alpha", f.se[2], 0.132, 0.005, true, false, kSeedsNote);
    if (opt.censored_tail) {
      ModelConfig ccfg = cfg;
      ccfg.censored_tail = true;
      const FitResult fc = fit(ccfg, seeds);
      b.add("theta1.censored", fc.estimate("theta1"), 1.591, 0.005, false, true,
            "censored-tail variant");
      b.add("theta2.censored", fc.estimate("theta2"), 2.012, 0.005, false, true,
            "censored-tail variant");
      b.add("alpha.censored", fc.estimate("alpha"), -0.836, 0.01, false, true,
            "censored-tail variant");
    }
  }
  if (run2) {
    Builder b{rows, 2, secs};
    b.add("loglik_gain", gain, 10.206, 0.05, true, false, kSeedsNote);
  }
}

// ------------------------------------------------------------------------- 3
void criterion_3(std::vector<TargetRow>& rows) {
  const auto t0 = Clock::now();
  const PairSample seeds = seeds_plants();
  ModelConfig cfg;
  cfg.kind = ModelKind::Poisson3;
  cfg.t = 1.0;

  const ConfidenceCurve ca = profile(cfg, seeds, "alpha", linspace(-2.4, -0.45, 200));
  const auto ia = ca.interval(0.95);

  const ConfidenceCurve cr = profile_correlation(cfg, seeds, linspace(-0.15, -0.02, 200));
  const auto ir = cr.interval(0.95);

  Builder b{rows, 3, std::chrono::duration<double>(Clock::now() - t0).count()};
  b.add("alpha95.lo", ia.lo, -1.046, 0.02, true, false, kSeedsNote);
  b.add("alpha95.hi", ia.hi, -0.531, 0.02, true, false, kSeedsNote);
  b.add("rho95.lo", ir.lo, -0.077, 0.005, true, false, kSeedsNote);
  b.add("rho95.hi", ir.hi, -0.039, 0.005, true, false, kSeedsNote);
  b.add("rho_hat", cr.point_estimate, -0.061, 0.005, true, false, kSeedsNote);
}

// ------------------------------------------------------------------------- 4
void criterion_4(std::vector<TargetRow>& rows) {
  const auto t0 = Clock::now();
  const PairSample seeds = seeds_plants();
  ModelConfig cfg;
  cfg.kind = ModelKind::Poisson4;
  const FitResult f4 = fit(cfg, seeds);
  const ConfidenceCurve ct = profile(cfg, seeds, "t", logspace(0.3, 12.0, 90));
  const auto it = ct.interval(0.90);
  const double cc_inf = poisson4_cc_at_infinity(seeds, f4.loglik_max);

  Builder b{rows, 4, std::chrono::duration<double>(Clock::now() - t0).count()};
  b.add("t_hat", f4.estimate("t"), 1.084, 0.02, true, false, kSeedsNote);
  b.add("t90.lo", it.lo, 0.497, 0.05, true, false, kSeedsNote);
  b.add("t90.hi", it.hi, 2.272, 0.05, true, false, kSeedsNote);
  b.add("cc_at_infinity", cc_inf, 0.96, 0.02);
}

// ---------------------------------------------------------------------- 5, 6
void criteria_5_6(std::vector<TargetRow>& rows, bool run5, bool run6) {
  const auto t0 = Clock::now();
  const CountTable& table = seeds_table();
  const double n = static_cast<double>(table.total());
  const auto expd = AdjustmentSpec::exp_decay(1.0);

  const BivariateModel indep(MarginalSpec::poisson(1.591), expd, MarginalSpec::poisson(2.012),
                             expd, 0.0);
  const BivariateModel three(MarginalSpec::poisson(1.591), expd, MarginalSpec::poisson(2.012),
                             expd, -0.836);
  const Matrix e_ind = expected_table(indep, n, 6, 6);
  const Matrix e_three = expected_table(three, n, 6, 6);
  const GofReport g_ind = pearson(table, e_ind);
  const GofReport g_three = pearson(table, e_three);

  // caption-rates variant (Table 1 prints 1.700/2.013 but its values match
  // the ML rates; both are emitted, per the table's internal discrepancy)
  const BivariateModel indep_cap(MarginalSpec::poisson(1.700), expd, MarginalSpec::poisson(2.013),
                                 expd, 0.0);
  const GofReport g_cap = pearson(table, expected_table(indep_cap, n, 6, 6));

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (run5) {
    Builder b{rows, 5, secs};
    b.add("K.independence", g_ind.k_statistic, 32.601, 0.1);
    b.add("K.threeparam", g_three.k_statistic, 20.422, 0.1);
    b.add("maxP.independence", g_ind.max_abs_residual, 3.738, 0.02);
    b.add("maxP.threeparam", g_three.max_abs_residual, 2.274, 0.02);
    b.add("K.independence.caption_rates", g_cap.k_statistic, 32.601, 0.1, false, true,
          "independence expecteds at the caption rates 1.700/2.013");
  }
  if (run6) {
    Builder b{rows, 6, secs};
    b.add("E00.independence", e_ind[0][0], 26.1, 0.1);
    b.add("E11.independence", e_ind[1][1], 83.5, 0.1);
    b.add("E00.threeparam", e_three[0][0], 16.1, 0.1);
  }
}

// ------------------------------------------------------------------------- 7
void criterion_7(std::vector<TargetRow>& rows) {
  const auto t0 = Clock::now();
  const PairSample seeds = seeds_plants();
  const auto s = summary(seeds);
  Builder b{rows, 7, std::chrono::duration<double>(Clock::now() - t0).count()};
  b.add("total", static_cast<double>(seeds.size()), 958.0, 0.0);
  b.add("corr", s.count_model, -0.084, 0.0005, false, false,
        "covariance over Poisson sds (the published value's convention)");
  b.add("mean_x", s.mean_x, 1.700, 0.001);
  b.add("mean_y", s.mean_y, 2.013, 0.001);
  b.add("corr.pearson", s.pearson, -0.084, 0.0005, false, true,
        "plain Pearson variant, shown for comparison");
}

// ------------------------------------------------------------------------- 8
void criterion_8(std::vector<TargetRow>& rows) {
  const auto t0 = Clock::now();
  const PairSample pairs = twenty_pairs();
  ModelConfig cfg;
  cfg.kind = ModelKind::Binomial2;
  cfg.trials1 = cfg.trials2 = 100;
  cfg.x0 = cfg.y0 = 66;
  const FitResult f = fit(cfg, pairs);
  const ConfidenceCurve c = profile(cfg, pairs, "alpha", linspace(-3.9, 0.3, 211));
  const auto iv = c.interval(0.90);
  const auto s = summary(pairs);

  Builder b{rows, 8, std::chrono::duration<double>(Clock::now() - t0).count()};
  b.add("alpha_hat", f.estimate("alpha"), -2.222, 0.02);
  b.add("alpha90.lo", iv.lo, -3.137, 0.05);
  b.add("alpha90.hi", iv.hi, -0.785, 0.05);
  b.add("corr", s.pearson, -0.325, 0.001);
}

// ------------------------------------------------------------------------- 9
void criterion_9(std::vector<TargetRow>& rows) {
  const auto t0 = Clock::now();
  const StudySample studies = auditc();
  ModelConfig cfg;
  cfg.kind = ModelKind::AuditC3;
  const FitResult f = fit(cfg, studies);

  ProfileOptions plug;
  plug.fixed_nuisance = true;
  const ConfidenceCurve cp = profile(cfg, studies, "alpha", linspace(-3.95, 0.6, 400), plug);
  const auto ip = cp.interval(0.90);

  const ConfidenceCurve ct = profile(cfg, studies, "alpha", linspace(-3.95, 0.6, 200));
  const auto itv = ct.interval(0.90);

  const auto [x0, y0] = default_auditc_thresholds(studies);
  const auto corrs = auditc_model_correlations(studies, x0, y0, f.estimate("p1"),
                                               f.estimate("p2"), f.estimate("alpha"));
  const double mean_corr = std::accumulate(corrs.begin(), corrs.end(), 0.0) / corrs.size();

  Builder b{rows, 9, std::chrono::duration<double>(Clock::now() - t0).count()};
  b.add("alpha_hat", f.estimate("alpha"), -2.60, 0.25);
  b.add("alpha90.lo", ip.lo, -3.80, 0.25, false, false,
        "plug-in curve, nuisance p's fixed at the MLE (the published interval's construction)");
  b.add("alpha90.hi", ip.hi, -0.63, 0.25, false, false,
        "plug-in curve, nuisance p's fixed at the MLE (the published interval's construction)");
  b.add("model_corr", mean_corr, -0.41, 0.05, false, false, "mean per-study model correlation");
  b.add("alpha90.lo.profile", itv.lo, -3.80, 0.25, false, true,
        "true profile: left end clamps at the admissibility boundary");
  b.add("alpha90.hi.profile", itv.hi, -0.63, 0.25, false, true, "true profile");
}

// ------------------------------------------------------------------------ 10
void criterion_10(std::vector<TargetRow>& rows) {
  const auto t0 = Clock::now();
  Builder b{rows, 10, 0.0};

  // marginal preservation + nonnegativity at near-endpoint alpha
  {
    struct Combo {
      MarginalSpec m1, m2;
      AdjustmentSpec a1, a2;
    };
    const std::vector<Combo> combos = {
        {MarginalSpec::poisson(1.7), MarginalSpec::poisson(2.0125), AdjustmentSpec::exp_decay(1.0),
         AdjustmentSpec::exp_decay(1.0)},
        {MarginalSpec::poisson(1.7), MarginalSpec::poisson(2.0125),
         AdjustmentSpec::limit_brutal(), AdjustmentSpec::limit_brutal()},
        {MarginalSpec::binomial(100, 0.66), MarginalSpec::binomial(100, 0.66),
         AdjustmentSpec::indicator_threshold(66), AdjustmentSpec::indicator_threshold(66)},
        {MarginalSpec::binomial(20, 0.35), MarginalSpec::binomial(40, 0.6),
         AdjustmentSpec::linear_centered(), AdjustmentSpec::linear_centered()},
        {MarginalSpec::normal(0, 1), MarginalSpec::normal(0, 1), AdjustmentSpec::phi_kernel(),
         AdjustmentSpec::phi_kernel()},
        {MarginalSpec::normal(0.5, 2), MarginalSpec::normal(0, 1),
         AdjustmentSpec::quadrant_indicator(), AdjustmentSpec::quadrant_indicator()},
        {MarginalSpec::normal(0, 1), MarginalSpec::normal(0, 1),
         AdjustmentSpec::exp_quadratic(1, 1), AdjustmentSpec::exp_quadratic(1, 1)},
        {MarginalSpec::exponential(1.0), MarginalSpec::exponential(2.0),
         AdjustmentSpec::exp_decay(2.0), AdjustmentSpec::exp_decay(1.0)},
        {MarginalSpec::poisson(2.0), MarginalSpec::binomial(100, 0.66),
         AdjustmentSpec::exp_decay(1.0), AdjustmentSpec::indicator_threshold(66)},
    };
    double worst = 0.0;
    for (const auto& co : combos) {
      const auto range = BivariateModel::alpha_range(co.m1, co.a1, co.m2, co.a2);
      for (double frac : {-1.0 + 1e-6, -0.5, -0.1, 0.1, 0.5, 1.0 - 1e-6}) {
        const BivariateModel model(co.m1, co.a1, co.m2, co.a2, frac * range.second);
        worst = std::max(worst, checks::marginalization_error(model));
      }
    }
    b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.add("marginal_preservation", worst, 0.0, 1e-10);
  }

  // closed-form centers and cross moments vs brute force
  {
    double worst_a = 0.0, worst_nu = 0.0;
    auto check = [&](const AdjustmentSpec& adj, const MarginalSpec& m) {
      worst_a = std::max(worst_a, std::abs(adj.center(m) - checks::bf_center(adj, m)));
      worst_nu = std::max(worst_nu, std::abs(adj.nu(m) - checks::bf_nu(adj, m)));
    };
    for (double th : {0.5, 1.0, 1.7, 2.0, 5.0}) {
      for (double t : {0.5, 1.0, 1.084, 2.0}) {
        check(AdjustmentSpec::exp_decay(t), MarginalSpec::poisson(th));
        check(AdjustmentSpec::exp_decay(t), MarginalSpec::exponential(th));
      }
      check(AdjustmentSpec::limit_brutal(), MarginalSpec::poisson(th));
    }
    for (int n : {20, 100}) {
      for (double p : {0.2, 0.5, 0.66}) {
        const auto m = MarginalSpec::binomial(n, p);
        check(AdjustmentSpec::linear_centered(), m);
        for (int x0 = 0; x0 < n; ++x0) check(AdjustmentSpec::indicator_threshold(x0), m);
      }
    }
    for (const auto& m : {MarginalSpec::normal(0, 1), MarginalSpec::normal(0.5, 2)}) {
      check(AdjustmentSpec::phi_kernel(), m);
      check(AdjustmentSpec::quadrant_indicator(), m);
      for (double s : {0.0, 1.0})
        for (double t : {0.5, 1.0}) check(AdjustmentSpec::exp_quadratic(s, t), m);
    }
    b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.add("oracle_center", worst_a, 0.0, 1e-8);
    b.add("oracle_nu", worst_nu, 0.0, 1e-8);
  }

  // correlation formula vs brute-force sums
  {
    double worst = 0.0;
    const auto expd = AdjustmentSpec::exp_decay(1.0);
    const BivariateModel pois(MarginalSpec::poisson(1.7), expd, MarginalSpec::poisson(2.0125),
                              expd, -0.8);
    const BivariateModel bino(MarginalSpec::binomial(100, 0.66),
                              AdjustmentSpec::indicator_threshold(66),
                              MarginalSpec::binomial(100, 0.66),
                              AdjustmentSpec::indicator_threshold(66), -1.73);
    const BivariateModel mixed(MarginalSpec::poisson(2.0), expd, MarginalSpec::binomial(100, 0.66),
                               AdjustmentSpec::indicator_threshold(66), 1.2);
    const BivariateModel brutal(MarginalSpec::poisson(1.7), AdjustmentSpec::limit_brutal(),
                                MarginalSpec::poisson(2.0125), AdjustmentSpec::limit_brutal(),
                                -0.9);
    for (const auto* m : {&pois, &bino, &mixed, &brutal})
      worst = std::max(worst, std::abs(m->correlation() - checks::bf_correlation(*m)));
    b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.add("correlation_formula", worst, 0.0, 1e-8);
  }

  // simulate -> refit recovery
  {
    const double th1 = 1.6, th2 = 2.0, alpha = -0.8;
    const auto expd = AdjustmentSpec::exp_decay(1.0);
    const BivariateModel truth(MarginalSpec::poisson(th1), expd, MarginalSpec::poisson(th2), expd,
                               alpha);
    int recovered = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto draws = truth.sample(10000, 1000 + rep);
      PairSample data;
      data.provenance = "sim";
      data.pairs.reserve(draws.size());
      for (const auto& [x, y] : draws)
        data.pairs.emplace_back(static_cast<int>(x), static_cast<int>(y));
      ModelConfig cfg;
      cfg.kind = ModelKind::Poisson3;
      cfg.t = 1.0;
      const FitResult f = fit(cfg, data);
      const double tr[3] = {th1, th2, alpha};
      bool ok = f.se.size() == 3;
      for (int k = 0; k < 3 && ok; ++k)
        ok = std::abs(f.estimates[k] - tr[k]) <= 4.0 * f.se[k];
      recovered += ok ? 1 : 0;
    }
    b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.add("refit_recovery", recovered, 100.0, 5.0, false, false,
          "replications recovering truth within 4 se (>= 95 required)");
  }

  // conditional variance of the phi-kernel model vs quadrature
  {
    const auto m = MarginalSpec::normal(0, 1);
    const auto phi = AdjustmentSpec::phi_kernel();
    const double alpha = 6.0;
    const BivariateModel model(m, phi, m, phi, alpha);
    const double a = phi.center(m);
    auto var_quad = [&](double x) {
      const Conditional c = model.conditional_given_x(x);
      const double m1 = checks::integrate([&](double y) { return y * c.pdf(y); }, -10, 10, 400);
      const double m2 =
          checks::integrate([&](double y) { return y * y * c.pdf(y); }, -10, 10, 400);
      return m2 - m1 * m1;
    };
    double worst = 0.0;
    for (double x : {0.0, 0.3, 0.8326, 1.5, 3.0}) {
      const double closed = 1.0 - 0.5 * alpha * a * (norm_pdf(x) - a);
      worst = std::max(worst, std::abs(var_quad(x) - closed));
    }
    const double x0 = std::sqrt(std::log(2.0));
    const double left = var_quad(x0 - 0.05) - 1.0;
    const double right = var_quad(x0 + 0.05) - 1.0;
    b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.add("var_given_x", worst, 0.0, 1e-6);
    b.add("var_sign_change", (left < 0.0 && right > 0.0) ? 1.0 : 0.0, 1.0, 0.0, false, false,
          "Var(Y|x) crosses 1 at |x| = sqrt(log 2)");
  }

  // binormal expansion: residual against 1 + rho x y is O(rho^2) with a
  // stable constant
  {
    double cmin = 1e300, cmax = 0.0;
    for (double rho : {0.01, 0.02, 0.05}) {
      double worst = 0.0;
      for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j) {
          const double x = 0.2 * i, y = 0.2 * j;
          worst = std::max(worst,
                           std::abs(binormal_ratio(x, y, rho) - (1.0 + rho * x * y)) / (rho * rho));
        }
      cmin = std::min(cmin, worst);
      cmax = std::max(cmax, worst);
    }
    b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.add("binormal_order", cmax, 4.5, 1.0, false, false, "fitted residual constant");
    b.add("binormal_order_stability", cmax / cmin, 1.0, 0.2);
  }

  // correlation ranges
  {
    const int n = 1000000;
    const auto m = MarginalSpec::binomial(n, 0.5);
    const auto ind = AdjustmentSpec::indicator_threshold(n / 2);
    const auto r_b = BivariateModel::corr_range(m, ind, m, ind);
    const auto mn = MarginalSpec::normal(0, 1);
    const auto eq = AdjustmentSpec::exp_quadratic(1, 1);
    const auto r_q = BivariateModel::corr_range(mn, eq, mn, eq);
    b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.add("corr_range_binomial", r_b.hi, 0.636, 0.002);
    b.add("corr_range_expquad", r_q.hi, 0.25, 0.005);
  }
}

}  // namespace

std::vector<TargetRow> run_all(const Options& opt) {
  auto wanted = [&](int c) {
    return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), c) != opt.only.end();
  };
  std::vector<TargetRow> rows;
  if (wanted(1) || wanted(2)) criteria_1_2(rows, opt, wanted(1), wanted(2));
  if (wanted(3)) criterion_3(rows);
  if (wanted(4)) criterion_4(rows);
  if (wanted(5) || wanted(6)) criteria_5_6(rows, wanted(5), wanted(6));
  if (wanted(7)) criterion_7(rows);
  if (wanted(8)) criterion_8(rows);
  if (wanted(9)) criterion_9(rows);
  if (wanted(10)) criterion_10(rows);
  return rows;
}

bool all_pass(const std::vector<TargetRow>& rows) {
  for (const auto& r : rows)
    if (!r.informational && !r.pass) return false;
  return true;
}

bool matches_documented_state(const std::vector<TargetRow>& rows) {
  for (const auto& r : rows)
    if (!r.informational && !r.pass && !r.expected_fail) return false;
  return true;
}

std::string render_text(const std::vector<TargetRow>& rows) {
  std::ostringstream out;
  out << "criterion  target                          observed      expected      tol       status\n";
  for (const auto& r : rows) {
    char line[256];
    const char* status = r.pass            ? "PASS"
                         : r.informational  ? "MISS (informational)"
                         : r.expected_fail ? "FAIL (documented)"
                                           : "FAIL";
    std::snprintf(line, sizeof line, "%9d  %-30s  %12.6g  %12.6g  %8.2g  %s", r.criterion,
                  r.id.c_str(), r.observed, r.target, r.tol, status);
    out << line;
    if (!r.note.empty()) out << "  [" << r.note << "]";
    out << "\n";
  }
  return out.str();
}

}  // namespace bivadj::report
