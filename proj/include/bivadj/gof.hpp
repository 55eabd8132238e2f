#pragma once

#include <vector>

#include "bivadj/bivariate.hpp"

namespace bivadj {

using Matrix = std::vector<std::vector<double>>;

/// Observed counts on a (K1+1) x (K2+1) grid where the last row/column means
/// "K or more".
struct CountTable {
  std::vector<std::vector<int>> counts;

  int rows() const { return static_cast<int>(counts.size()); }
  int cols() const { return counts.empty() ? 0 : static_cast<int>(counts[0].size()); }
  long total() const;
};

/// E_ij = n * f(i,j) for interior cells; the final row/column aggregate the
/// tail mass (P(X >= K) style), so the table sums to n. Discrete marginals
/// only.
Matrix expected_table(const BivariateModel& model, double n, int rows, int cols);

struct GofReport {
  Matrix expected;
  Matrix residuals;  // (N - E)/sqrt(E)
  double k_statistic = 0.0;
  double max_abs_residual = 0.0;
};

/// Pearson residuals and K = sum of squared residuals. Throws
/// std::invalid_argument on shape mismatch or a nonpositive expected cell.
GofReport pearson(const CountTable& observed, const Matrix& expected);

}  // namespace bivadj
