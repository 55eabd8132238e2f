#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bivadj/datasets.hpp"
#include "bivadj/nelder_mead.hpp"

namespace bivadj {

enum class ModelKind {
  Poisson3,   // theta1, theta2, alpha; exp-decay adjustment, t fixed
  Poisson4,   // adds t (optimized on log t)
  Binomial2,  // common p, alpha; indicator thresholds fixed
  AuditC3,    // p1, p2, alpha; per-study sizes and thresholds
};

struct ModelConfig {
  ModelKind kind = ModelKind::Poisson3;
  double t = 1.0;              // Poisson3 tuning
  bool censored_tail = false;  // treat tail_cell as "tail_cell or more"
  int tail_cell = 5;
  int trials1 = 100, trials2 = 100;  // Binomial2
  int x0 = -1, y0 = -1;              // Binomial2 thresholds (required)
  std::vector<int> study_x0, study_y0;  // AuditC3; empty selects the default rule
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<double> se;
  double loglik_max = 0.0;
  std::vector<std::vector<double>> info;  // observed information
  bool converged = false;
  int n_evals = 0;

  double estimate(const std::string& name) const;
};

struct ConfidenceCurve {
  std::string param_name;
  std::vector<double> grid;  // sorted; includes the point estimate
  std::vector<double> deviance;
  std::vector<double> cc;
  std::vector<bool> ok;  // inner optimization succeeded / point feasible
  double point_estimate = 0.0;
  double loglik_max = 0.0;

  struct Interval {
    double lo = 0.0, hi = 0.0;
    bool lo_at_edge = false, hi_at_edge = false;  // clamped at grid end or feasibility edge
  };
  /// Level-L interval {psi : cc(psi) <= L} by linear interpolation between
  /// grid points (infeasible points count as cc = 1).
  Interval interval(double level) const;
};

struct FitOptions {
  NelderMeadOptions nm;
  bool polish = true;  // Newton steps on the FD gradient after the simplex
};

struct ProfileOptions {
  /// Hold nuisance parameters at the global estimates instead of
  /// re-maximizing per grid point (the plug-in / estimated-likelihood curve;
  /// also drops the whole-support admissibility constraint, keeping only
  /// positivity of the observed brackets).
  bool fixed_nuisance = false;
  /// Evaluate grid points concurrently; implies global-estimate warm starts
  /// so the result is deterministic and order independent.
  bool parallel = false;
  double inner_f_tol = 1e-11;
};

// Log-likelihoods. All return -infinity (not an exception) when a parameter
// is infeasible or an observed bracket is nonpositive; require_admissible
// additionally rejects alpha outside the bona fide density range.
double loglik_poisson3(const PairSample& data, double theta1, double theta2, double alpha,
                       double t, bool require_admissible = true);
double loglik_poisson3_censored(const PairSample& data, double theta1, double theta2, double alpha,
                                double t, int tail_cell, bool require_admissible = true);
double loglik_limit_brutal(const PairSample& data, double theta1, double theta2, double alpha,
                           bool require_admissible = true);
double loglik_binomial2(const PairSample& data, int trials1, int trials2, int x0, int y0, double p,
                        double alpha, bool require_admissible = true);
double loglik_auditc3(const StudySample& data, const std::vector<int>& x0,
                      const std::vector<int>& y0, double p1, double p2, double alpha,
                      bool require_admissible = true);

/// Independence fit of the marginals alone (alpha = 0): the reference for
/// likelihood-gain comparisons.
double loglik_independent_poisson(const PairSample& data, double theta1, double theta2);

/// Default AuditC thresholds: round(n_i * pooled proportion) per margin.
std::pair<std::vector<int>, std::vector<int>> default_auditc_thresholds(const StudySample& data);

FitResult fit(const ModelConfig& config, const PairSample& data, const FitOptions& opt = {});
FitResult fit(const ModelConfig& config, const StudySample& data, const FitOptions& opt = {});

ConfidenceCurve profile(const ModelConfig& config, const PairSample& data,
                        const std::string& param, std::vector<double> grid,
                        const ProfileOptions& opt = {});
ConfidenceCurve profile(const ModelConfig& config, const StudySample& data,
                        const std::string& param, std::vector<double> grid,
                        const ProfileOptions& opt = {});

/// Profile for the model correlation rho of the Poisson3 model, via
/// alpha = rho / (sqrt(theta1 theta2) a1 a2 d^2).
ConfidenceCurve profile_correlation(const ModelConfig& config, const PairSample& data,
                                    std::vector<double> rho_grid, const ProfileOptions& opt = {});

/// cc(t -> infinity) for the Poisson4 profile: deviance of the limit-brutal
/// fit against the four-parameter maximum.
double poisson4_cc_at_infinity(const PairSample& data, double loglik4_max);

struct ScoreTest {
  double alpha_hat = 0.0;
  double statistic = 0.0;  // alpha_hat scaled by the observed information
  double p_value = 1.0;
};

/// One-parameter independence test with the marginals plugged in.
ScoreTest independence_score_test(const PairSample& data, const MarginalSpec& m1,
                                  const AdjustmentSpec& adj1, const MarginalSpec& m2,
                                  const AdjustmentSpec& adj2);

/// Per-study model correlations of a fitted AuditC3 model.
std::vector<double> auditc_model_correlations(const StudySample& data,
                                              const std::vector<int>& x0,
                                              const std::vector<int>& y0, double p1, double p2,
                                              double alpha);

}  // namespace bivadj
