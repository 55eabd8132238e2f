#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace bivadj {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
  double f_tol = 1e-9;    // simplex log-likelihood spread at convergence
  int max_iter = 4000;    // per restart
  int restarts = 3;       // jittered restarts from the incumbent
  std::uint64_t seed = 0x5eedULL;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fmax = 0.0;
  int n_evals = 0;
  bool converged = false;
};

/// Maximizes f by the reflection/expansion/contraction simplex method.
/// Infeasible points may return -infinity; the start must be feasible.
NelderMeadResult nelder_mead_maximize(const Objective& f, std::vector<double> start,
                                      std::vector<double> step,
                                      const NelderMeadOptions& opt = {});

}  // namespace bivadj
