#include "bivadj/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bivadj/kernels.hpp"

namespace bivadj {

const CountTable& seeds_table() {
  static const CountTable table{{
      {7, 41, 54, 40, 21, 9},
      {36, 79, 73, 58, 30, 13},
      {39, 70, 69, 47, 25, 10},
      {24, 41, 39, 26, 14, 6},
      {10, 18, 18, 11, 6, 2},
      {3, 6, 6, 4, 2, 1},
  }};
  return table;
}

PairSample seeds_plants() { return expand_table(seeds_table(), "seeds_plants"); }

PairSample twenty_pairs() {
  PairSample s;
  s.provenance = "twenty_pairs";
  s.pairs = {{67, 65}, {69, 61}, {64, 71}, {54, 71}, {73, 66}, {68, 64}, {61, 66},
             {77, 66}, {76, 62}, {59, 66}, {71, 63}, {69, 65}, {66, 65}, {70, 57},
             {64, 62}, {73, 71}, {72, 61}, {69, 63}, {64, 68}, {67, 56}};
  return s;
}

StudySample auditc() {
  StudySample s;
  s.provenance = "auditc";
  s.rows = {{47, 56, 738, 839},    {126, 177, 1543, 1815}, {36, 39, 276, 354},
            {130, 149, 959, 1170}, {59, 64, 136, 191},     {142, 192, 2788, 3359},
            {137, 161, 358, 465},  {57, 60, 437, 540},     {34, 35, 56, 77},
            {152, 203, 264, 352}};
  return s;
}

PairSample expand_table(const CountTable& table, std::string provenance) {
  PairSample s;
  s.provenance = std::move(provenance);
  for (int x = 0; x < table.rows(); ++x)
    for (int y = 0; y < table.cols(); ++y)
      for (int k = 0; k < table.counts[x][y]; ++k) s.pairs.emplace_back(x, y);
  return s;
}

CountTable tabulate(const PairSample& sample, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("tabulate: bad shape");
  CountTable t;
  t.counts.assign(rows, std::vector<int>(cols, 0));
  for (const auto& [x, y] : sample.pairs)
    ++t.counts[std::min(x, rows - 1)][std::min(y, cols - 1)];
  return t;
}

Summary summary(const PairSample& sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::domain_error("summary: need at least two pairs");
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = sample.pairs[i].first;
    ys[i] = sample.pairs[i].second;
  }
  const auto m = kernels::pair_moments(xs, ys);
  Summary out;
  out.mean_x = m.sx / n;
  out.mean_y = m.sy / n;
  const double cov = m.sxy / n - out.mean_x * out.mean_y;
  const double vx = m.sxx / n - out.mean_x * out.mean_x;
  const double vy = m.syy / n - out.mean_y * out.mean_y;
  if (!(vx > 0.0) || !(vy > 0.0))
    throw std::domain_error("summary: correlation undefined for a constant coordinate");
  out.pearson = cov / std::sqrt(vx * vy);
  out.count_model = cov / std::sqrt(out.mean_x * out.mean_y);
  return out;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& cell, const std::string& path, std::size_t lineno) {
  std::string_view sv(cell);
  while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
  while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) sv.remove_suffix(1);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) {
    std::ostringstream msg;
    msg << path << ":" << lineno << ": expected an integer, got '" << cell << "'";
    throw std::runtime_error(msg.str());
  }
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void fail_row(const std::string& path, std::size_t lineno, const std::string& why) {
  std::ostringstream msg;
  msg << path << ":" << lineno << ": " << why;
  throw std::runtime_error(msg.str());
}

}  // namespace

PairSample load_pairs_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty file");
  const auto header = split_commas(lines[0]);
  if (header.size() != 2 || header[0] != "x" || header[1] != "y")
    throw std::runtime_error(path + ":1: expected header 'x,y'");
  PairSample s;
  s.provenance = path;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split_commas(lines[i]);
    if (cells.size() != 2) fail_row(path, i + 1, "expected two columns");
    const int x = parse_int(cells[0], path, i + 1);
    const int y = parse_int(cells[1], path, i + 1);
    if (x < 0 || y < 0) fail_row(path, i + 1, "counts must be nonnegative");
    s.pairs.emplace_back(x, y);
  }
  if (s.pairs.empty()) throw std::runtime_error(path + ": no data rows");
  return s;
}

CountTable load_table_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() != 6) throw std::runtime_error(path + ": expected a 6x6 grid (6 lines)");
  CountTable t;
  for (std::size_t i = 0; i < 6; ++i) {
    auto cells = split_commas(lines[i]);
    if (cells.size() == 1) cells = split_ws(lines[i]);
    if (cells.size() != 6) fail_row(path, i + 1, "expected six columns");
    std::vector<int> row;
    for (const auto& cell : cells) {
      const int v = parse_int(cell, path, i + 1);
      if (v < 0) fail_row(path, i + 1, "counts must be nonnegative");
      row.push_back(v);
    }
    t.counts.push_back(std::move(row));
  }
  return t;
}

StudySample load_studies_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty file");
  const auto header = split_commas(lines[0]);
  if (header.size() != 4 || header[0] != "x" || header[1] != "n1" || header[2] != "y" ||
      header[3] != "n2")
    throw std::runtime_error(path + ":1: expected header 'x,n1,y,n2'");
  StudySample s;
  s.provenance = path;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split_commas(lines[i]);
    if (cells.size() != 4) fail_row(path, i + 1, "expected four columns");
    StudyRow row;
    row.x = parse_int(cells[0], path, i + 1);
    row.n1 = parse_int(cells[1], path, i + 1);
    row.y = parse_int(cells[2], path, i + 1);
    row.n2 = parse_int(cells[3], path, i + 1);
    if (row.n1 < 1 || row.n2 < 1) fail_row(path, i + 1, "group sizes must be positive");
    if (row.x < 0 || row.x > row.n1) fail_row(path, i + 1, "x outside [0, n1]");
    if (row.y < 0 || row.y > row.n2) fail_row(path, i + 1, "y outside [0, n2]");
    s.rows.push_back(row);
  }
  if (s.rows.empty()) throw std::runtime_error(path + ": no data rows");
  return s;
}

std::string to_csv(const PairSample& sample) {
  std::ostringstream out;
  out << "x,y\n";
  for (const auto& [x, y] : sample.pairs) out << x << "," << y << "\n";
  return out.str();
}

std::string to_csv(const StudySample& sample) {
  std::ostringstream out;
  out << "x,n1,y,n2\n";
  for (const auto& r : sample.rows) out << r.x << "," << r.n1 << "," << r.y << "," << r.n2 << "\n";
  return out.str();
}

}  // namespace bivadj
