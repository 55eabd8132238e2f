#include "bivadj/gof.hpp"

#include <cmath>
#include <stdexcept>

namespace bivadj {

long CountTable::total() const {
  long n = 0;
  for (const auto& row : counts)
    for (int c : row) n += c;
  return n;
}

Matrix expected_table(const BivariateModel& model, double n, int rows, int cols) {
  const MarginalSpec& m1 = model.m1();
  const MarginalSpec& m2 = model.m2();
  if (!m1.discrete() || !m2.discrete())
    throw std::invalid_argument("expected_table: discrete marginals required");
  if (rows < 2 || cols < 2 || n <= 0.0) throw std::invalid_argument("expected_table: bad shape");

  const int top1 = std::max(m1.support_max(), rows - 1);
  const int top2 = std::max(m2.support_max(), cols - 1);

  // per-axis pmf and f*h partial sums; tail blocks follow from
  // sum_{x>=R} f1 h1 and sum_{x>=R} f1. Cells past a binomial support end
  // carry zero mass.
  std::vector<double> f1(top1 + 1, 0.0), h1(top1 + 1, 0.0), f2(top2 + 1, 0.0),
      h2(top2 + 1, 0.0);
  for (int x = 0; x <= std::min(top1, m1.support_max()); ++x) {
    f1[x] = m1.pmf_or_pdf(x);
    h1[x] = model.adj1().g(x, m1) - model.center1();
  }
  for (int y = 0; y <= std::min(top2, m2.support_max()); ++y) {
    f2[y] = m2.pmf_or_pdf(y);
    h2[y] = model.adj2().g(y, m2) - model.center2();
  }

  double tail_f1 = 0.0, tail_fh1 = 0.0;
  for (int x = rows - 1; x <= top1; ++x) {
    tail_f1 += f1[x];
    tail_fh1 += f1[x] * h1[x];
  }
  double tail_f2 = 0.0, tail_fh2 = 0.0;
  for (int y = cols - 1; y <= top2; ++y) {
    tail_f2 += f2[y];
    tail_fh2 += f2[y] * h2[y];
  }
  // fold the truncated remainder beyond top into the tails so rows sum to n
  tail_f1 += 1.0 - model.m1().cdf(top1);
  tail_f2 += 1.0 - model.m2().cdf(top2);

  const double alpha = model.alpha();
  Matrix e(rows, std::vector<double>(cols, 0.0));
  for (int i = 0; i < rows; ++i) {
    const bool tr = (i == rows - 1);
    const double fa = tr ? tail_f1 : f1[i];
    const double fha = tr ? tail_fh1 : f1[i] * h1[i];
    for (int j = 0; j < cols; ++j) {
      const bool tc = (j == cols - 1);
      const double fb = tc ? tail_f2 : f2[j];
      const double fhb = tc ? tail_fh2 : f2[j] * h2[j];
      e[i][j] = n * (fa * fb + alpha * fha * fhb);
    }
  }
  return e;
}

GofReport pearson(const CountTable& observed, const Matrix& expected) {
  const int rows = observed.rows();
  const int cols = observed.cols();
  if (static_cast<int>(expected.size()) != rows ||
      (rows > 0 && static_cast<int>(expected[0].size()) != cols))
    throw std::invalid_argument("pearson: table shapes differ");

  GofReport rep;
  rep.expected = expected;
  rep.residuals.assign(rows, std::vector<double>(cols, 0.0));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!(expected[i][j] > 0.0))
        throw std::invalid_argument("pearson: nonpositive expected cell");
      const double p = (observed.counts[i][j] - expected[i][j]) / std::sqrt(expected[i][j]);
      rep.residuals[i][j] = p;
      rep.k_statistic += p * p;
      rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(p));
    }
  }
  return rep;
}

}  // namespace bivadj
