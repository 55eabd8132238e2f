#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bivadj/gof.hpp"

namespace bivadj {

/// Count pairs (x_i, y_i) with a provenance label.
struct PairSample {
  std::vector<std::pair<int, int>> pairs;
  std::string provenance;

  std::size_t size() const { return pairs.size(); }
};

/// One 2x2-table study row: correct-yes count x of n1 diseased, correct-no
/// count y of n2 non-diseased.
struct StudyRow {
  int x = 0, n1 = 0, y = 0, n2 = 0;
};

struct StudySample {
  std::vector<StudyRow> rows;
  std::string provenance;
};

/// Seeds-and-plants 6x6 table, n = 958; the "5" row/column means 5-or-more.
const CountTable& seeds_table();
/// The table expanded to 958 pairs (row-major, 5-or-more recorded as 5).
PairSample seeds_plants();
/// Twenty simulated Bin(100, 0.66) pairs.
PairSample twenty_pairs();
/// The ten AuditC study rows.
StudySample auditc();

PairSample expand_table(const CountTable& table, std::string provenance);
/// Tabulate pairs onto a rows x cols grid, clamping into the final
/// "K or more" row/column.
CountTable tabulate(const PairSample& sample, int rows, int cols);

struct Summary {
  double mean_x = 0.0;
  double mean_y = 0.0;
  /// Plain Pearson correlation of the pairs.
  double pearson = 0.0;
  /// Covariance over sqrt(mean_x * mean_y): the count-model normalization
  /// (Poisson sd in place of the sample sd), which is how the published
  /// seeds value -0.084 is computed.
  double count_model = 0.0;
};

/// Sample means and correlation estimates. Throws std::domain_error for a
/// constant coordinate or fewer than two pairs.
Summary summary(const PairSample& sample);

// CSV schemas: pairs = header "x,y" + integer rows; table = 6x6 integer grid,
// no header; studies = header "x,n1,y,n2". UTF-8, comma separated, \n or \r\n.
PairSample load_pairs_csv(const std::string& path);
CountTable load_table_csv(const std::string& path);
StudySample load_studies_csv(const std::string& path);

std::string to_csv(const PairSample& sample);
std::string to_csv(const StudySample& sample);

}  // namespace bivadj
