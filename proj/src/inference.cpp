#include "bivadj/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "bivadj/kernels.hpp"
#include "bivadj/special.hpp"

namespace bivadj {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// collapsed representation of a pair sample: unique values per axis plus
// per-cell weights, so a likelihood evaluation is O(distinct cells)

struct Cells {
  std::vector<int> xs, ys;     // unique sorted values
  std::vector<double> xw, yw;  // marginal weights
  std::vector<double> w;       // cell weights
  std::vector<int> cx, cy;     // cell -> unique-value index
  double n = 0.0;
};

Cells collapse(const PairSample& data) {
  if (data.pairs.empty()) throw std::invalid_argument("empty pair sample");
  std::map<std::pair<int, int>, double> counts;
  for (const auto& p : data.pairs) {
    if (p.first < 0 || p.second < 0) throw std::domain_error("negative count in pair sample");
    counts[p] += 1.0;
  }
  Cells c;
  c.n = static_cast<double>(data.pairs.size());
  std::map<int, int> xidx, yidx;
  for (const auto& [xy, w] : counts) {
    xidx.emplace(xy.first, 0);
    yidx.emplace(xy.second, 0);
    (void)w;
  }
  for (auto& [v, i] : xidx) {
    i = static_cast<int>(c.xs.size());
    c.xs.push_back(v);
  }
  for (auto& [v, i] : yidx) {
    i = static_cast<int>(c.ys.size());
    c.ys.push_back(v);
  }
  c.xw.assign(c.xs.size(), 0.0);
  c.yw.assign(c.ys.size(), 0.0);
  for (const auto& [xy, w] : counts) {
    c.w.push_back(w);
    c.cx.push_back(xidx[xy.first]);
    c.cy.push_back(yidx[xy.second]);
    c.xw[xidx[xy.first]] += w;
    c.yw[yidx[xy.second]] += w;
  }
  return c;
}

const std::vector<double>& lgamma_table(int upto) {
  thread_local std::vector<double> table;  // table[k] = lgamma(k+1)
  while (static_cast<int>(table.size()) <= upto)
    table.push_back(std::lgamma(static_cast<double>(table.size()) + 1.0));
  return table;
}

struct Scratch {
  std::vector<double> lp1, lp2, h1, h2, hx, hy, br;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

// shared cross-term evaluation: gathers per-cell h values, forms brackets,
// and returns the weighted log sum (-inf on a nonpositive bracket)
double cross_term(const Cells& c, double alpha, const std::vector<double>& h1,
                  const std::vector<double>& h2, Scratch& s) {
  s.hx.resize(c.w.size());
  s.hy.resize(c.w.size());
  for (std::size_t k = 0; k < c.w.size(); ++k) {
    s.hx[k] = h1[c.cx[k]];
    s.hy[k] = h2[c.cy[k]];
  }
  s.br.resize(c.w.size());
  kernels::bracket(alpha, s.hx, s.hy, s.br);
  return kernels::weighted_log_sum(c.w, s.br);
}

double poisson3_cells(const Cells& c, double th1, double th2, double alpha, double t,
                      bool admissible) {
  if (!(th1 > 0.0) || !(th2 > 0.0) || !(t > 0.0)) return kNegInf;
  const double d = -std::expm1(-t);
  const double a1 = std::exp(-d * th1);
  const double a2 = std::exp(-d * th2);
  if (admissible) {
    const double c1 = std::max(a1, 1.0 - a1);
    const double c2 = std::max(a2, 1.0 - a2);
    if (!(std::abs(alpha) < 1.0 / (c1 * c2))) return kNegInf;
  }
  auto& s = scratch();
  const auto& lg = lgamma_table(std::max(c.xs.back(), c.ys.back()));
  const double l1 = std::log(th1), l2 = std::log(th2);
  s.lp1.resize(c.xs.size());
  s.h1.resize(c.xs.size());
  for (std::size_t i = 0; i < c.xs.size(); ++i) {
    s.lp1[i] = -th1 + c.xs[i] * l1 - lg[c.xs[i]];
    s.h1[i] = std::exp(-t * c.xs[i]) - a1;
  }
  s.lp2.resize(c.ys.size());
  s.h2.resize(c.ys.size());
  for (std::size_t i = 0; i < c.ys.size(); ++i) {
    s.lp2[i] = -th2 + c.ys[i] * l2 - lg[c.ys[i]];
    s.h2[i] = std::exp(-t * c.ys[i]) - a2;
  }
  const double marg = kernels::dot(c.xw, s.lp1) + kernels::dot(c.yw, s.lp2);
  const double cross = cross_term(c, alpha, s.h1, s.h2, s);
  return marg + cross;
}

double limit_brutal_cells(const Cells& c, double th1, double th2, double alpha, bool admissible) {
  if (!(th1 > 0.0) || !(th2 > 0.0)) return kNegInf;
  const double a1 = std::exp(-th1);
  const double a2 = std::exp(-th2);
  if (admissible) {
    const double c1 = std::max(a1, 1.0 - a1);
    const double c2 = std::max(a2, 1.0 - a2);
    if (!(std::abs(alpha) < 1.0 / (c1 * c2))) return kNegInf;
  }
  auto& s = scratch();
  const auto& lg = lgamma_table(std::max(c.xs.back(), c.ys.back()));
  const double l1 = std::log(th1), l2 = std::log(th2);
  s.lp1.resize(c.xs.size());
  s.h1.resize(c.xs.size());
  for (std::size_t i = 0; i < c.xs.size(); ++i) {
    s.lp1[i] = -th1 + c.xs[i] * l1 - lg[c.xs[i]];
    s.h1[i] = (c.xs[i] == 0 ? 1.0 : 0.0) - a1;
  }
  s.lp2.resize(c.ys.size());
  s.h2.resize(c.ys.size());
  for (std::size_t i = 0; i < c.ys.size(); ++i) {
    s.lp2[i] = -th2 + c.ys[i] * l2 - lg[c.ys[i]];
    s.h2[i] = (c.ys[i] == 0 ? 1.0 : 0.0) - a2;
  }
  const double marg = kernels::dot(c.xw, s.lp1) + kernels::dot(c.yw, s.lp2);
  return marg + cross_term(c, alpha, s.h1, s.h2, s);
}

// censored tail: cells at tail_cell mean "tail_cell or more"; their mass is
// aggregated with the partial sums T = sum_{x>=tc} f h and P = P(X >= tc)
double poisson3_censored_cells(const Cells& c, double th1, double th2, double alpha, double t,
                               int tail_cell, bool admissible) {
  if (!(th1 > 0.0) || !(th2 > 0.0) || !(t > 0.0)) return kNegInf;
  const double d = -std::expm1(-t);
  const double a1 = std::exp(-d * th1);
  const double a2 = std::exp(-d * th2);
  if (admissible) {
    const double c1 = std::max(a1, 1.0 - a1);
    const double c2 = std::max(a2, 1.0 - a2);
    if (!(std::abs(alpha) < 1.0 / (c1 * c2))) return kNegInf;
  }
  const auto& lg = lgamma_table(std::max({c.xs.back(), c.ys.back(), tail_cell}));
  const double l1 = std::log(th1), l2 = std::log(th2);
  auto head_sums = [&](double th, double lth, double a) {
    double sf = 0.0, sg = 0.0;
    for (int k = 0; k < tail_cell; ++k) {
      const double f = std::exp(-th + k * lth - lg[k]);
      sf += f;
      sg += f * std::exp(-t * k);
    }
    return std::pair{1.0 - sf, a * sf - sg};  // {P(X >= tc), sum_{x>=tc} f h}
  };
  const auto [ptail1, t1] = head_sums(th1, l1, a1);
  const auto [ptail2, t2] = head_sums(th2, l2, a2);

  double ll = 0.0;
  for (std::size_t k = 0; k < c.w.size(); ++k) {
    const int x = c.xs[c.cx[k]];
    const int y = c.ys[c.cy[k]];
    const bool tx = x >= tail_cell, ty = y >= tail_cell;
    double term;
    if (!tx && !ty) {
      const double h1 = std::exp(-t * x) - a1;
      const double h2 = std::exp(-t * y) - a2;
      const double br = 1.0 + alpha * h1 * h2;
      if (!(br > 0.0)) return kNegInf;
      term = (-th1 + x * l1 - lg[x]) + (-th2 + y * l2 - lg[y]) + std::log(br);
    } else if (tx && !ty) {
      const double h2 = std::exp(-t * y) - a2;
      const double mass = ptail1 + alpha * h2 * t1;
      if (!(mass > 0.0)) return kNegInf;
      term = (-th2 + y * l2 - lg[y]) + std::log(mass);
    } else if (!tx && ty) {
      const double h1 = std::exp(-t * x) - a1;
      const double mass = ptail2 + alpha * h1 * t2;
      if (!(mass > 0.0)) return kNegInf;
      term = (-th1 + x * l1 - lg[x]) + std::log(mass);
    } else {
      const double mass = ptail1 * ptail2 + alpha * t1 * t2;
      if (!(mass > 0.0)) return kNegInf;
      term = std::log(mass);
    }
    ll += c.w[k] * term;
  }
  return ll;
}

double binomial2_cells(const Cells& c, int n1, int n2, int x0, int y0, double p, double alpha,
                       bool admissible) {
  if (!(p > 0.0 && p < 1.0)) return kNegInf;
  const MarginalSpec mx = MarginalSpec::binomial(n1, p);
  const MarginalSpec my = MarginalSpec::binomial(n2, p);
  const double b1 = mx.cdf(x0);
  const double b2 = my.cdf(y0);
  if (admissible) {
    const double c1 = std::max(b1, 1.0 - b1);
    const double c2 = std::max(b2, 1.0 - b2);
    if (!(std::abs(alpha) < 1.0 / (c1 * c2))) return kNegInf;
  }
  auto& s = scratch();
  const double lp = std::log(p), lq = std::log1p(-p);
  s.lp1.resize(c.xs.size());
  s.h1.resize(c.xs.size());
  for (std::size_t i = 0; i < c.xs.size(); ++i) {
    const int x = c.xs[i];
    s.lp1[i] = log_choose(n1, x) + x * lp + (n1 - x) * lq;
    s.h1[i] = (x <= x0 ? 1.0 : 0.0) - b1;
  }
  s.lp2.resize(c.ys.size());
  s.h2.resize(c.ys.size());
  for (std::size_t i = 0; i < c.ys.size(); ++i) {
    const int y = c.ys[i];
    s.lp2[i] = log_choose(n2, y) + y * lp + (n2 - y) * lq;
    s.h2[i] = (y <= y0 ? 1.0 : 0.0) - b2;
  }
  const double marg = kernels::dot(c.xw, s.lp1) + kernels::dot(c.yw, s.lp2);
  return marg + cross_term(c, alpha, s.h1, s.h2, s);
}

double auditc3_rows(const StudySample& data, const std::vector<int>& x0,
                    const std::vector<int>& y0, double p1, double p2, double alpha,
                    bool admissible) {
  if (!(p1 > 0.0 && p1 < 1.0) || !(p2 > 0.0 && p2 < 1.0)) return kNegInf;
  double ll = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& r = data.rows[i];
    const MarginalSpec mx = MarginalSpec::binomial(r.n1, p1);
    const MarginalSpec my = MarginalSpec::binomial(r.n2, p2);
    const double b1 = mx.cdf(x0[i]);
    const double b2 = my.cdf(y0[i]);
    if (admissible) {
      const double c1 = std::max(b1, 1.0 - b1);
      const double c2 = std::max(b2, 1.0 - b2);
      bound = std::min(bound, 1.0 / (c1 * c2));
    }
    const double h1 = (r.x <= x0[i] ? 1.0 : 0.0) - b1;
    const double h2 = (r.y <= y0[i] ? 1.0 : 0.0) - b2;
    const double br = 1.0 + alpha * h1 * h2;
    if (!(br > 0.0)) return kNegInf;
    ll += mx.log_pmf_or_pdf(r.x) + my.log_pmf_or_pdf(r.y) + std::log(br);
  }
  if (admissible && !(std::abs(alpha) < bound)) return kNegInf;
  return ll;
}

// ---------------------------------------------------------------------------
// generic parameterized model: natural coordinates for reporting, optionally
// transformed coordinates for optimization (Poisson4 optimizes log t)

struct ParamModel {
  std::vector<std::string> names;
  std::vector<double> start;  // natural
  std::vector<double> step;   // optimization space
  std::function<double(const std::vector<double>&)> loglik;         // natural, admissible
  std::function<double(const std::vector<double>&)> loglik_domain;  // natural, brackets only
  std::function<std::vector<double>(std::vector<double>)> to_opt =
      [](std::vector<double> v) { return v; };
  std::function<std::vector<double>(std::vector<double>)> to_nat =
      [](std::vector<double> v) { return v; };
};

ParamModel build_pair_model(const ModelConfig& config, const PairSample& data) {
  auto cells = std::make_shared<Cells>(collapse(data));
  ParamModel pm;
  switch (config.kind) {
    case ModelKind::Poisson3: {
      const double mx = std::inner_product(cells->xs.begin(), cells->xs.end(), cells->xw.begin(),
                                           0.0) / cells->n;
      const double my = std::inner_product(cells->ys.begin(), cells->ys.end(), cells->yw.begin(),
                                           0.0) / cells->n;
      pm.names = {"theta1", "theta2", "alpha"};
      pm.start = {mx, my, 0.0};
      pm.step = {0.15, 0.15, 0.3};
      const double t = config.t;
      const bool cens = config.censored_tail;
      const int tc = config.tail_cell;
      auto make = [cells, t, cens, tc](bool adm) {
        return [cells, t, cens, tc, adm](const std::vector<double>& q) {
          return cens ? poisson3_censored_cells(*cells, q[0], q[1], q[2], t, tc, adm)
                      : poisson3_cells(*cells, q[0], q[1], q[2], t, adm);
        };
      };
      pm.loglik = make(true);
      pm.loglik_domain = make(false);
      break;
    }
    case ModelKind::Poisson4: {
      const double mx = std::inner_product(cells->xs.begin(), cells->xs.end(), cells->xw.begin(),
                                           0.0) / cells->n;
      const double my = std::inner_product(cells->ys.begin(), cells->ys.end(), cells->yw.begin(),
                                           0.0) / cells->n;
      pm.names = {"theta1", "theta2", "alpha", "t"};
      pm.start = {mx, my, 0.0, 1.0};
      pm.step = {0.15, 0.15, 0.3, 0.4};  // last step on log t
      const bool cens = config.censored_tail;
      const int tc = config.tail_cell;
      auto make = [cells, cens, tc](bool adm) {
        return [cells, cens, tc, adm](const std::vector<double>& q) {
          return cens ? poisson3_censored_cells(*cells, q[0], q[1], q[2], q[3], tc, adm)
                      : poisson3_cells(*cells, q[0], q[1], q[2], q[3], adm);
        };
      };
      pm.loglik = make(true);
      pm.loglik_domain = make(false);
      pm.to_opt = [](std::vector<double> v) {
        v[3] = std::log(v[3]);
        return v;
      };
      pm.to_nat = [](std::vector<double> v) {
        v[3] = std::exp(v[3]);
        return v;
      };
      break;
    }
    case ModelKind::Binomial2: {
      if (config.x0 < 0 || config.y0 < 0)
        throw std::invalid_argument("binomial2: thresholds x0/y0 required");
      if (config.x0 > config.trials1 || config.y0 > config.trials2)
        throw std::invalid_argument("binomial2: thresholds beyond the support");
      for (const auto& [x, y] : data.pairs)
        if (x > config.trials1 || y > config.trials2)
          throw std::domain_error("binomial2: observation above the number of trials");
      const double mx = std::inner_product(cells->xs.begin(), cells->xs.end(), cells->xw.begin(),
                                           0.0) / cells->n;
      const double my = std::inner_product(cells->ys.begin(), cells->ys.end(), cells->yw.begin(),
                                           0.0) / cells->n;
      pm.names = {"p", "alpha"};
      pm.start = {0.5 * (mx / config.trials1 + my / config.trials2), 0.0};
      pm.step = {0.02, 0.4};
      const int n1 = config.trials1, n2 = config.trials2, x0 = config.x0, y0 = config.y0;
      auto make = [cells, n1, n2, x0, y0](bool adm) {
        return [cells, n1, n2, x0, y0, adm](const std::vector<double>& q) {
          return binomial2_cells(*cells, n1, n2, x0, y0, q[0], q[1], adm);
        };
      };
      pm.loglik = make(true);
      pm.loglik_domain = make(false);
      break;
    }
    case ModelKind::AuditC3:
      throw std::invalid_argument("auditc3 expects study data, not pairs");
  }
  return pm;
}

ParamModel build_study_model(const ModelConfig& config, const StudySample& data) {
  if (config.kind != ModelKind::AuditC3)
    throw std::invalid_argument("study data requires the auditc3 model");
  auto thresholds = config.study_x0.empty() || config.study_y0.empty()
                        ? default_auditc_thresholds(data)
                        : std::pair{config.study_x0, config.study_y0};
  if (thresholds.first.size() != data.rows.size() || thresholds.second.size() != data.rows.size())
    throw std::invalid_argument("auditc3: one threshold per study required");
  double sx = 0, sn1 = 0, sy = 0, sn2 = 0;
  for (const auto& r : data.rows) {
    sx += r.x;
    sn1 += r.n1;
    sy += r.y;
    sn2 += r.n2;
  }
  ParamModel pm;
  pm.names = {"p1", "p2", "alpha"};
  pm.start = {sx / sn1, sy / sn2, 0.0};
  pm.step = {0.02, 0.02, 0.4};
  auto rows = std::make_shared<StudySample>(data);
  auto x0 = std::make_shared<std::vector<int>>(std::move(thresholds.first));
  auto y0 = std::make_shared<std::vector<int>>(std::move(thresholds.second));
  auto make = [rows, x0, y0](bool adm) {
    return [rows, x0, y0, adm](const std::vector<double>& q) {
      return auditc3_rows(*rows, *x0, *y0, q[0], q[1], q[2], adm);
    };
  };
  pm.loglik = make(true);
  pm.loglik_domain = make(false);
  return pm;
}

// ---------------------------------------------------------------------------
// finite differences and small SPD solves

std::vector<double> fd_steps(const std::vector<double>& x) {
  std::vector<double> h(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) h[k] = std::max(1e-4 * std::abs(x[k]), 1e-5);
  return h;
}

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, const std::vector<double>& h) {
  std::vector<double> g(x.size());
  std::vector<double> p = x;
  for (std::size_t k = 0; k < x.size(); ++k) {
    p[k] = x[k] + h[k];
    const double fp = f(p);
    p[k] = x[k] - h[k];
    const double fm = f(p);
    p[k] = x[k];
    g[k] = (fp - fm) / (2.0 * h[k]);
  }
  return g;
}

std::vector<std::vector<double>> fd_hessian(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x,
    const std::vector<double>& h) {
  const std::size_t dim = x.size();
  std::vector<std::vector<double>> H(dim, std::vector<double>(dim, 0.0));
  const double f0 = f(x);
  std::vector<double> p = x;
  for (std::size_t i = 0; i < dim; ++i) {
    p[i] = x[i] + h[i];
    const double fp = f(p);
    p[i] = x[i] - h[i];
    const double fm = f(p);
    p[i] = x[i];
    H[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      p[i] = x[i] + h[i];
      p[j] = x[j] + h[j];
      const double fpp = f(p);
      p[j] = x[j] - h[j];
      const double fpm = f(p);
      p[i] = x[i] - h[i];
      const double fmm = f(p);
      p[j] = x[j] + h[j];
      const double fmp = f(p);
      p[i] = x[i];
      p[j] = x[j];
      H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return H;
}

// Cholesky of an SPD matrix; false when not positive definite
bool cholesky(std::vector<std::vector<double>> a, std::vector<std::vector<double>>& L) {
  const std::size_t n = a.size();
  L.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (std::size_t k = 0; k < j; ++k) sum -= L[i][k] * L[j][k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        L[i][i] = std::sqrt(sum);
      } else {
        L[i][j] = sum / L[j][j];
      }
    }
  }
  return true;
}

bool spd_solve(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
               std::vector<double>& x) {
  std::vector<std::vector<double>> L;
  if (!cholesky(a, L)) return false;
  const std::size_t n = a.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= L[i][k] * y[k];
    y[i] = s / L[i][i];
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= L[k][i] * x[k];
    x[i] = s / L[i][i];
  }
  return true;
}

bool spd_inverse(const std::vector<std::vector<double>>& a,
                 std::vector<std::vector<double>>& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  std::vector<double> e(n, 0.0), col;
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    if (!spd_solve(a, e, col)) return false;
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return true;
}

FitResult fit_param_model(const ParamModel& pm, const FitOptions& opt) {
  auto objective = [&](const std::vector<double>& q) { return pm.loglik(pm.to_nat(q)); };
  NelderMeadResult nm = nelder_mead_maximize(objective, pm.to_opt(pm.start), pm.step, opt.nm);
  std::vector<double> est = pm.to_nat(nm.x);
  double best = nm.fmax;

  if (opt.polish) {
    for (int round = 0; round < 6; ++round) {
      const auto h = fd_steps(est);
      const auto g = fd_gradient(pm.loglik, est, h);
      double gmax = 0.0;
      for (double v : g) gmax = std::max(gmax, std::abs(v));
      if (gmax < 1e-7) break;
      auto H = fd_hessian(pm.loglik, est, h);
      std::vector<std::vector<double>> negH = H;
      for (auto& row : negH)
        for (double& v : row) v = -v;
      std::vector<double> delta;
      if (!spd_solve(negH, g, delta)) break;
      bool improved = false;
      for (double scale = 1.0; scale > 1.0 / 64.0; scale *= 0.5) {
        std::vector<double> trial = est;
        for (std::size_t k = 0; k < est.size(); ++k) trial[k] += scale * delta[k];
        const double val = pm.loglik(trial);
        if (val > best) {
          est = std::move(trial);
          best = val;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
  }

  FitResult out;
  out.names = pm.names;
  out.estimates = est;
  out.loglik_max = best;
  out.n_evals = nm.n_evals;
  const auto h = fd_steps(est);
  const auto H = fd_hessian(pm.loglik, est, h);
  out.info.assign(est.size(), std::vector<double>(est.size(), 0.0));
  bool finite = true;
  for (std::size_t i = 0; i < est.size(); ++i)
    for (std::size_t j = 0; j < est.size(); ++j) {
      out.info[i][j] = -0.5 * (H[i][j] + H[j][i]);  // symmetrized observed information
      finite = finite && std::isfinite(out.info[i][j]);
    }
  if (!finite) out.info.clear();  // boundary optimum: no usable curvature
  std::vector<std::vector<double>> inv;
  const bool spd = finite && spd_inverse(out.info, inv);
  if (spd) {
    out.se.resize(est.size());
    for (std::size_t k = 0; k < est.size(); ++k) out.se[k] = std::sqrt(inv[k][k]);
  }
  out.converged = nm.converged && spd;
  return out;
}

int param_index(const ParamModel& pm, const std::string& param) {
  for (std::size_t k = 0; k < pm.names.size(); ++k)
    if (pm.names[k] == param) return static_cast<int>(k);
  throw std::invalid_argument("unknown parameter '" + param + "'");
}

// inner maximization over the non-focus parameters, from a warm start
// (both in natural coordinates); returns {lprof, argmax} or -inf
std::pair<double, std::vector<double>> inner_max(const ParamModel& pm, int pidx, double value,
                                                 const std::vector<double>& warm_nat,
                                                 double f_tol) {
  const std::size_t dim = pm.names.size();
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < dim; ++k)
    if (static_cast<int>(k) != pidx) rest.push_back(k);

  auto assemble = [&](const std::vector<double>& q_red) {
    std::vector<double> full_opt(dim);
    std::vector<double> fixed = warm_nat;
    fixed[pidx] = value;
    full_opt = pm.to_opt(fixed);
    for (std::size_t r = 0; r < rest.size(); ++r) full_opt[rest[r]] = q_red[r];
    return pm.to_nat(full_opt);
  };
  auto reduced = [&](const std::vector<double>& q_red) { return pm.loglik(assemble(q_red)); };

  std::vector<double> start_opt = pm.to_opt([&] {
    std::vector<double> v = warm_nat;
    v[pidx] = value;
    return v;
  }());
  std::vector<double> start_red(rest.size()), step_red(rest.size());
  for (std::size_t r = 0; r < rest.size(); ++r) {
    start_red[r] = start_opt[rest[r]];
    step_red[r] = 0.5 * pm.step[rest[r]];
  }
  if (!(reduced(start_red) > kNegInf)) {
    // warm start infeasible at this focus value; probe shrunken steps toward
    // the start before giving up
    bool found = false;
    for (double shrink : {0.5, 0.25, 0.1, 0.05}) {
      std::vector<double> probe = start_red;
      for (std::size_t r = 0; r < rest.size(); ++r) probe[r] = start_red[r] * (1.0 - shrink);
      if (reduced(probe) > kNegInf) {
        start_red = probe;
        found = true;
        break;
      }
    }
    if (!found) return {kNegInf, warm_nat};
  }
  NelderMeadOptions nmopt;
  nmopt.f_tol = f_tol;
  nmopt.max_iter = 3000;
  nmopt.restarts = 1;
  const auto res = nelder_mead_maximize(reduced, start_red, step_red, nmopt);
  if (!(res.fmax > kNegInf)) return {kNegInf, warm_nat};
  return {res.fmax, assemble(res.x)};
}

ConfidenceCurve profile_impl(const ParamModel& pm, const FitResult& fitres, int pidx,
                             std::vector<double> grid, const ProfileOptions& opt) {
  if (grid.size() < 2 && !opt.fixed_nuisance)
    throw std::invalid_argument("profile: grid needs at least two points");
  const double psi_hat = fitres.estimates[pidx];
  grid.push_back(psi_hat);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             grid.end());

  ConfidenceCurve curve;
  curve.param_name = pm.names[pidx];
  curve.grid = grid;
  curve.point_estimate = psi_hat;
  const std::size_t npts = grid.size();
  std::vector<double> lprof(npts, kNegInf);

  const auto est_it = std::min_element(grid.begin(), grid.end(), [&](double a, double b) {
    return std::abs(a - psi_hat) < std::abs(b - psi_hat);
  });
  const std::size_t est_idx = static_cast<std::size_t>(est_it - grid.begin());

  if (opt.fixed_nuisance) {
    for (std::size_t i = 0; i < npts; ++i) {
      std::vector<double> q = fitres.estimates;
      q[pidx] = grid[i];
      lprof[i] = pm.loglik_domain(q);
    }
  } else if (opt.parallel) {
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> futs;
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (std::size_t i = next.fetch_add(1); i < npts; i = next.fetch_add(1))
        lprof[i] = inner_max(pm, pidx, grid[i], fitres.estimates, opt.inner_f_tol).first;
    };
    for (unsigned wkr = 0; wkr < workers; ++wkr)
      futs.push_back(std::async(std::launch::async, work));
    for (auto& f : futs) f.get();
  } else {
    // outward from the estimate with warm starts, falling back to the global
    // estimates; keep the better of the two inner solutions
    auto sweep = [&](std::vector<std::size_t> order) {
      std::vector<double> warm = fitres.estimates;
      for (std::size_t i : order) {
        auto [l1, arg1] = inner_max(pm, pidx, grid[i], warm, opt.inner_f_tol);
        auto [l2, arg2] = inner_max(pm, pidx, grid[i], fitres.estimates, opt.inner_f_tol);
        if (l1 >= l2) {
          lprof[i] = l1;
          if (l1 > kNegInf) warm = arg1;
        } else {
          lprof[i] = l2;
          warm = arg2;
        }
      }
    };
    std::vector<std::size_t> right, left;
    for (std::size_t i = est_idx; i < npts; ++i) right.push_back(i);
    for (std::size_t i = est_idx + 1; i-- > 0;) left.push_back(i);
    sweep(right);
    sweep(left);
  }

  double lmax = fitres.loglik_max;
  for (double v : lprof) lmax = std::max(lmax, v);
  curve.loglik_max = lmax;
  curve.deviance.resize(npts);
  curve.cc.resize(npts);
  curve.ok.resize(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    curve.ok[i] = lprof[i] > kNegInf;
    curve.deviance[i] =
        curve.ok[i] ? std::max(0.0, 2.0 * (lmax - lprof[i]))
                    : std::numeric_limits<double>::infinity();
    curve.cc[i] = curve.ok[i] ? chi1_cdf(curve.deviance[i]) : 1.0;
  }
  return curve;
}

}  // namespace

double FitResult::estimate(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return estimates[k];
  throw std::invalid_argument("unknown parameter '" + name + "'");
}

ConfidenceCurve::Interval ConfidenceCurve::interval(double level) const {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("interval: level outside (0,1)");
  const std::size_t npts = grid.size();
  auto value = [&](std::size_t i) { return ok[i] ? cc[i] : 1.0; };
  std::size_t e = 0;
  for (std::size_t i = 1; i < npts; ++i)
    if (std::abs(grid[i] - point_estimate) < std::abs(grid[e] - point_estimate)) e = i;

  Interval out;
  // left
  out.lo = grid.front();
  out.lo_at_edge = true;
  for (std::size_t i = e + 1; i-- > 0;) {
    if (value(i) >= level) {
      if (i == e) {  // degenerate: the whole grid sits above the level
        out.lo = grid[e];
        out.lo_at_edge = false;
        break;
      }
      const double c0 = value(i), c1 = value(i + 1);
      out.lo = c0 == c1 ? grid[i]
                        : grid[i] + (c0 - level) / (c0 - c1) * (grid[i + 1] - grid[i]);
      out.lo_at_edge = !ok[i];
      break;
    }
  }
  // right
  out.hi = grid.back();
  out.hi_at_edge = true;
  for (std::size_t i = e; i < npts; ++i) {
    if (value(i) >= level) {
      if (i == e) {
        out.hi = grid[e];
        out.hi_at_edge = false;
        break;
      }
      const double c0 = value(i), c1 = value(i - 1);
      out.hi = c0 == c1 ? grid[i]
                        : grid[i] - (c0 - level) / (c0 - c1) * (grid[i] - grid[i - 1]);
      out.hi_at_edge = !ok[i];
      break;
    }
  }
  return out;
}

double loglik_poisson3(const PairSample& data, double theta1, double theta2, double alpha,
                       double t, bool require_admissible) {
  return poisson3_cells(collapse(data), theta1, theta2, alpha, t, require_admissible);
}

double loglik_poisson3_censored(const PairSample& data, double theta1, double theta2, double alpha,
                                double t, int tail_cell, bool require_admissible) {
  return poisson3_censored_cells(collapse(data), theta1, theta2, alpha, t, tail_cell,
                                 require_admissible);
}

double loglik_limit_brutal(const PairSample& data, double theta1, double theta2, double alpha,
                           bool require_admissible) {
  return limit_brutal_cells(collapse(data), theta1, theta2, alpha, require_admissible);
}

double loglik_binomial2(const PairSample& data, int trials1, int trials2, int x0, int y0, double p,
                        double alpha, bool require_admissible) {
  return binomial2_cells(collapse(data), trials1, trials2, x0, y0, p, alpha, require_admissible);
}

double loglik_auditc3(const StudySample& data, const std::vector<int>& x0,
                      const std::vector<int>& y0, double p1, double p2, double alpha,
                      bool require_admissible) {
  if (x0.size() != data.rows.size() || y0.size() != data.rows.size())
    throw std::invalid_argument("loglik_auditc3: one threshold per study required");
  return auditc3_rows(data, x0, y0, p1, p2, alpha, require_admissible);
}

double loglik_independent_poisson(const PairSample& data, double theta1, double theta2) {
  if (!(theta1 > 0.0) || !(theta2 > 0.0)) return kNegInf;
  const Cells c = collapse(data);
  const auto& lg = lgamma_table(std::max(c.xs.back(), c.ys.back()));
  double ll = 0.0;
  for (std::size_t i = 0; i < c.xs.size(); ++i)
    ll += c.xw[i] * (-theta1 + c.xs[i] * std::log(theta1) - lg[c.xs[i]]);
  for (std::size_t i = 0; i < c.ys.size(); ++i)
    ll += c.yw[i] * (-theta2 + c.ys[i] * std::log(theta2) - lg[c.ys[i]]);
  return ll;
}

std::pair<std::vector<int>, std::vector<int>> default_auditc_thresholds(const StudySample& data) {
  double sx = 0, sn1 = 0, sy = 0, sn2 = 0;
  for (const auto& r : data.rows) {
    sx += r.x;
    sn1 += r.n1;
    sy += r.y;
    sn2 += r.n2;
  }
  const double p1 = sx / sn1, p2 = sy / sn2;
  std::vector<int> x0, y0;
  for (const auto& r : data.rows) {
    x0.push_back(static_cast<int>(std::lround(r.n1 * p1)));
    y0.push_back(static_cast<int>(std::lround(r.n2 * p2)));
  }
  return {x0, y0};
}

FitResult fit(const ModelConfig& config, const PairSample& data, const FitOptions& opt) {
  return fit_param_model(build_pair_model(config, data), opt);
}

FitResult fit(const ModelConfig& config, const StudySample& data, const FitOptions& opt) {
  return fit_param_model(build_study_model(config, data), opt);
}

ConfidenceCurve profile(const ModelConfig& config, const PairSample& data,
                        const std::string& param, std::vector<double> grid,
                        const ProfileOptions& opt) {
  const ParamModel pm = build_pair_model(config, data);
  const FitResult f = fit_param_model(pm, {});
  return profile_impl(pm, f, param_index(pm, param), std::move(grid), opt);
}

ConfidenceCurve profile(const ModelConfig& config, const StudySample& data,
                        const std::string& param, std::vector<double> grid,
                        const ProfileOptions& opt) {
  const ParamModel pm = build_study_model(config, data);
  const FitResult f = fit_param_model(pm, {});
  return profile_impl(pm, f, param_index(pm, param), std::move(grid), opt);
}

ConfidenceCurve profile_correlation(const ModelConfig& config, const PairSample& data,
                                    std::vector<double> rho_grid, const ProfileOptions& opt) {
  if (config.kind != ModelKind::Poisson3)
    throw std::invalid_argument("profile_correlation: poisson3 only");
  const ParamModel base = build_pair_model(config, data);
  const FitResult f3 = fit_param_model(base, {});
  const double d = -std::expm1(-config.t);

  // corr = alpha sqrt(th1 th2) a1 a2 d^2, inverted for alpha
  auto alpha_of = [d](double rho, double th1, double th2) {
    const double a1 = std::exp(-d * th1);
    const double a2 = std::exp(-d * th2);
    return rho / (std::sqrt(th1 * th2) * a1 * a2 * d * d);
  };

  ParamModel pm;
  pm.names = {"rho", "theta1", "theta2"};
  const double th1_hat = f3.estimates[0], th2_hat = f3.estimates[1];
  const double rho_hat = f3.estimates[2] / alpha_of(1.0, th1_hat, th2_hat);
  pm.start = {rho_hat, th1_hat, th2_hat};
  pm.step = {0.01, 0.15, 0.15};
  auto make = [base, alpha_of](bool adm) {
    auto ll = adm ? base.loglik : base.loglik_domain;
    return [ll, alpha_of](const std::vector<double>& q) {
      if (!(q[1] > 0.0) || !(q[2] > 0.0)) return kNegInf;
      return ll({q[1], q[2], alpha_of(q[0], q[1], q[2])});
    };
  };
  pm.loglik = make(true);
  pm.loglik_domain = make(false);

  FitResult pseudo;
  pseudo.names = pm.names;
  pseudo.estimates = pm.start;
  pseudo.loglik_max = f3.loglik_max;
  return profile_impl(pm, pseudo, 0, std::move(rho_grid), opt);
}

double poisson4_cc_at_infinity(const PairSample& data, double loglik4_max) {
  auto cells = std::make_shared<Cells>(collapse(data));
  const double mx =
      std::inner_product(cells->xs.begin(), cells->xs.end(), cells->xw.begin(), 0.0) / cells->n;
  const double my =
      std::inner_product(cells->ys.begin(), cells->ys.end(), cells->yw.begin(), 0.0) / cells->n;
  ParamModel pm;
  pm.names = {"theta1", "theta2", "alpha"};
  pm.start = {mx, my, 0.0};
  pm.step = {0.15, 0.15, 0.3};
  pm.loglik = [cells](const std::vector<double>& q) {
    return limit_brutal_cells(*cells, q[0], q[1], q[2], true);
  };
  pm.loglik_domain = pm.loglik;
  const FitResult f = fit_param_model(pm, {});
  return chi1_cdf(std::max(0.0, 2.0 * (loglik4_max - f.loglik_max)));
}

ScoreTest independence_score_test(const PairSample& data, const MarginalSpec& m1,
                                  const AdjustmentSpec& adj1, const MarginalSpec& m2,
                                  const AdjustmentSpec& adj2) {
  adj1.require_compatible(m1);
  adj2.require_compatible(m2);
  const Cells c = collapse(data);
  std::vector<double> hh(c.w.size());
  for (std::size_t k = 0; k < c.w.size(); ++k)
    hh[k] = adj1.h(c.xs[c.cx[k]], m1) * adj2.h(c.ys[c.cy[k]], m2);
  const double bound = 1.0 / (adj1.bound(m1) * adj2.bound(m2));
  const double lo = -bound * (1.0 - 1e-9), hi = bound * (1.0 - 1e-9);

  auto dlog = [&](double alpha, double& d1, double& d2) {
    d1 = 0.0;
    d2 = 0.0;
    for (std::size_t k = 0; k < c.w.size(); ++k) {
      const double u = hh[k] / (1.0 + alpha * hh[k]);
      d1 += c.w[k] * u;
      d2 -= c.w[k] * u * u;
    }
  };
  double alpha = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    double d1, d2;
    dlog(alpha, d1, d2);
    if (std::abs(d1) < 1e-12 * c.n) break;
    double next = alpha - d1 / d2;  // concave: d2 < 0
    next = std::clamp(next, lo, hi);
    if (std::abs(next - alpha) < 1e-14) {
      alpha = next;
      break;
    }
    alpha = next;
  }
  double d1, d2;
  dlog(alpha, d1, d2);
  ScoreTest out;
  out.alpha_hat = alpha;
  out.statistic = alpha * std::sqrt(-d2);
  out.p_value = std::erfc(std::abs(out.statistic) / std::sqrt(2.0));
  return out;
}

std::vector<double> auditc_model_correlations(const StudySample& data,
                                              const std::vector<int>& x0,
                                              const std::vector<int>& y0, double p1, double p2,
                                              double alpha) {
  std::vector<double> out;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& r = data.rows[i];
    const MarginalSpec mx = MarginalSpec::binomial(r.n1, p1);
    const MarginalSpec my = MarginalSpec::binomial(r.n2, p2);
    const auto ax = AdjustmentSpec::indicator_threshold(x0[i]);
    const auto ay = AdjustmentSpec::indicator_threshold(y0[i]);
    out.push_back(alpha * ax.nu(mx) * ay.nu(my) / (mx.sd() * my.sd()));
  }
  return out;
}

}  // namespace bivadj
