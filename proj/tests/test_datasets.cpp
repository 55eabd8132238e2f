#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "bivadj/datasets.hpp"

using namespace bivadj;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "bivadj_test_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("seeds table integrity") {
  const auto& t = seeds_table();
  CHECK(t.total() == 958);
  const int row_sums[6] = {172, 289, 260, 150, 65, 22};
  const int col_sums[6] = {119, 255, 259, 186, 98, 41};
  for (int i = 0; i < 6; ++i) {
    int rs = 0, cs = 0;
    for (int j = 0; j < 6; ++j) {
      rs += t.counts[i][j];
      cs += t.counts[j][i];
    }
    CHECK(rs == row_sums[i]);
    CHECK(cs == col_sums[i]);
  }
}

TEST_CASE("seeds expansion and summary") {
  const auto seeds = seeds_plants();
  CHECK(seeds.size() == 958);
  const auto s = summary(seeds);
  CHECK(s.mean_x == doctest::Approx(1.700).epsilon(3e-4));
  CHECK(s.mean_y == doctest::Approx(2.0125).epsilon(3e-4));
  // the published observed correlation uses the Poisson-sd normalization
  CHECK(s.count_model == doctest::Approx(-0.084).epsilon(0.005));
  CHECK(s.pearson == doctest::Approx(-0.0936).epsilon(0.002));
}

TEST_CASE("expand then retabulate is the identity") {
  const auto& t = seeds_table();
  CHECK(tabulate(expand_table(t, "x"), 6, 6).counts == t.counts);
}

TEST_CASE("twenty pairs") {
  const auto p = twenty_pairs();
  REQUIRE(p.size() == 20);
  CHECK(p.pairs[0] == std::pair{67, 65});
  CHECK(summary(p).pearson == doctest::Approx(-0.325).epsilon(0.002));
}

TEST_CASE("auditc rows") {
  const auto s = auditc();
  REQUIRE(s.rows.size() == 10);
  CHECK(s.rows[0].x == 47);
  CHECK(s.rows[0].n1 == 56);
  CHECK(s.rows[0].y == 738);
  CHECK(s.rows[0].n2 == 839);
  CHECK(s.rows[5].n2 == 3359);
}

TEST_CASE("summary rejects degenerate input") {
  PairSample one;
  one.pairs = {{1, 2}};
  CHECK_THROWS_AS(summary(one), std::domain_error);
  PairSample flat;
  flat.pairs = {{1, 2}, {1, 3}, {1, 4}};
  CHECK_THROWS_AS(summary(flat), std::domain_error);
}

TEST_CASE("pairs csv") {
  TempFile f("x,y\n3,4\n");
  const auto s = load_pairs_csv(f.path);
  REQUIRE(s.size() == 1);
  CHECK(s.pairs[0] == std::pair{3, 4});
  CHECK(s.provenance == f.path);

  TempFile crlf("x,y\r\n3,4\r\n1,0\r\n");
  CHECK(load_pairs_csv(crlf.path).size() == 2);

  TempFile bad_header("a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(load_pairs_csv(bad_header.path), doctest::Contains(":1:"),
                       std::runtime_error);
  TempFile bad_value("x,y\n3,4\n5,oops\n");
  CHECK_THROWS_WITH_AS(load_pairs_csv(bad_value.path), doctest::Contains(":3:"),
                       std::runtime_error);
  TempFile negative("x,y\n-1,4\n");
  CHECK_THROWS_AS(load_pairs_csv(negative.path), std::runtime_error);
}

TEST_CASE("studies csv round trip and validation") {
  TempFile f(to_csv(auditc()));
  const auto loaded = load_studies_csv(f.path);
  REQUIRE(loaded.rows.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(loaded.rows[i].x == auditc().rows[i].x);
    CHECK(loaded.rows[i].n1 == auditc().rows[i].n1);
    CHECK(loaded.rows[i].y == auditc().rows[i].y);
    CHECK(loaded.rows[i].n2 == auditc().rows[i].n2);
  }
  TempFile bad("x,n1,y,n2\n60,56,738,839\n");  // x > n1
  CHECK_THROWS_WITH_AS(load_studies_csv(bad.path), doctest::Contains(":2:"), std::runtime_error);
}

TEST_CASE("table csv") {
  std::string grid;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) grid += std::to_string(seeds_table().counts[i][j]) + (j < 5 ? "," : "");
    grid += "\n";
  }
  TempFile f(grid);
  CHECK(load_table_csv(f.path).counts == seeds_table().counts);
  TempFile short_file("1,2,3,4,5,6\n");
  CHECK_THROWS_AS(load_table_csv(short_file.path), std::runtime_error);
}

TEST_CASE("pair csv emission round trips") {
  const auto p = twenty_pairs();
  TempFile f(to_csv(p));
  const auto loaded = load_pairs_csv(f.path);
  CHECK(loaded.pairs == p.pairs);
}
