#include "bivadj/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace bivadj {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Simplex {
  std::vector<std::vector<double>> x;
  std::vector<double> f;
};

// one converged run from a feasible start
NelderMeadResult run_once(const Objective& f, const std::vector<double>& start,
                          const std::vector<double>& step, const NelderMeadOptions& opt,
                          int& evals) {
  const std::size_t dim = start.size();
  auto eval = [&](const std::vector<double>& p) {
    ++evals;
    const double v = f(p);
    return std::isnan(v) ? kNegInf : v;
  };

  Simplex s;
  s.x.assign(dim + 1, start);
  s.f.assign(dim + 1, kNegInf);
  s.f[0] = eval(start);
  for (std::size_t k = 0; k < dim; ++k) {
    auto& vtx = s.x[k + 1];
    double scale = 1.0;
    for (int tries = 0; tries < 40; ++tries) {
      vtx[k] = start[k] + scale * step[k];
      s.f[k + 1] = eval(vtx);
      if (s.f[k + 1] > kNegInf) break;
      scale = -scale;                      // try the other side first,
      if (tries % 2 == 1) scale *= 0.5;    // then shrink
    }
  }

  auto order = [&]() {
    std::vector<std::size_t> idx(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.f[a] > s.f[b]; });
    Simplex t;
    for (std::size_t i : idx) {
      t.x.push_back(std::move(s.x[i]));
      t.f.push_back(s.f[i]);
    }
    s = std::move(t);
  };

  bool converged = false;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    order();
    if (std::isfinite(s.f[dim]) && s.f[0] - s.f[dim] < opt.f_tol) {
      converged = true;
      break;
    }
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += s.x[v][k] / dim;

    auto blend = [&](double coeff) {
      std::vector<double> p(dim);
      for (std::size_t k = 0; k < dim; ++k)
        p[k] = centroid[k] + coeff * (centroid[k] - s.x[dim][k]);
      return p;
    };

    const auto xr = blend(1.0);
    const double fr = eval(xr);
    if (fr > s.f[0]) {
      const auto xe = blend(2.0);
      const double fe = eval(xe);
      if (fe > fr) {
        s.x[dim] = xe;
        s.f[dim] = fe;
      } else {
        s.x[dim] = xr;
        s.f[dim] = fr;
      }
    } else if (fr > s.f[dim - 1]) {
      s.x[dim] = xr;
      s.f[dim] = fr;
    } else {
      const bool outside = fr > s.f[dim];
      const auto xc = blend(outside ? 0.5 : -0.5);
      const double fc = eval(xc);
      if (fc > (outside ? fr : s.f[dim])) {
        s.x[dim] = xc;
        s.f[dim] = fc;
      } else {
        for (std::size_t v = 1; v <= dim; ++v) {
          for (std::size_t k = 0; k < dim; ++k) s.x[v][k] = s.x[0][k] + 0.5 * (s.x[v][k] - s.x[0][k]);
          s.f[v] = eval(s.x[v]);
        }
      }
    }
  }
  order();
  return {s.x[0], s.f[0], 0, converged};
}

}  // namespace

NelderMeadResult nelder_mead_maximize(const Objective& f, std::vector<double> start,
                                      std::vector<double> step, const NelderMeadOptions& opt) {
  if (start.size() != step.size() || start.empty())
    throw std::invalid_argument("nelder_mead_maximize: start/step size mismatch");

  int evals = 0;
  NelderMeadResult best = run_once(f, start, step, opt, evals);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(0.3, 1.2);
  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<double> s2(step.size());
    for (std::size_t k = 0; k < step.size(); ++k)
      s2[k] = step[k] * jitter(rng) * (rng() & 1 ? 1.0 : -1.0);
    NelderMeadResult cand = run_once(f, best.x, s2, opt, evals);
    if (cand.fmax > best.fmax) {
      cand.converged = cand.converged || best.converged;
      best = std::move(cand);
    }
  }
  best.n_evals = evals;
  return best;
}

}  // namespace bivadj
