#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bivadj/datasets.hpp"
#include "bivadj/special.hpp"

namespace testsupport {

// asymptotic Kolmogorov-Smirnov p-value for a sample against U(0,1)
inline double ks_uniform_pvalue(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, (i + 1.0) / n - u[i]);
    d = std::max(d, u[i] - i / n);
  }
  const double lambda = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

// chi-square independence test p-value on a tabulated pair sample
inline double independence_chisq_pvalue(const bivadj::PairSample& sample, int rows, int cols) {
  const auto table = bivadj::tabulate(sample, rows, cols);
  const double n = static_cast<double>(table.total());
  std::vector<double> rsum(rows, 0.0), csum(cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      rsum[i] += table.counts[i][j];
      csum[j] += table.counts[i][j];
    }
  double stat = 0.0;
  int df = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double e = rsum[i] * csum[j] / n;
      if (e < 5.0) continue;  // drop sparse cells rather than pooling
      const double diff = table.counts[i][j] - e;
      stat += diff * diff / e;
      ++df;
    }
  df -= rows + cols - 1;
  if (df < 1) return 1.0;
  return 1.0 - bivadj::chisq_cdf(df, stat);
}

inline bivadj::PairSample to_pair_sample(const std::vector<std::pair<double, double>>& draws,
                                         const char* label) {
  bivadj::PairSample s;
  s.provenance = label;
  s.pairs.reserve(draws.size());
  for (const auto& [x, y] : draws)
    s.pairs.emplace_back(static_cast<int>(x), static_cast<int>(y));
  return s;
}

}  // namespace testsupport
