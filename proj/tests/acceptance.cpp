// Acceptance suite: runs every reproduction criterion at its stated tolerance
// and prints one pass/fail line per criterion. Criteria whose published targets
// are documented as irreproducible (the seeds section's reported optimum is
// not a maximum of its own likelihood; see README) are printed as failures
// with their observed values; the process exit code asserts that the outcome
// matches that documented state exactly, so any regression or unexpected
// change still fails the test suite.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "bivadj/report.hpp"

int main() {
  using bivadj::report::TargetRow;
  const std::vector<TargetRow> rows = bivadj::report::run_all({});

  std::map<int, std::vector<const TargetRow*>> by_criterion;
  for (const auto& r : rows) by_criterion[r.criterion].push_back(&r);

  bool state_ok = true;
  for (const auto& [criterion, list] : by_criterion) {
    bool pass = true, documented = false, unexpected = false;
    double seconds = 0.0;
    for (const TargetRow* r : list) {
      seconds = std::max(seconds, r->seconds);
      if (r->informational) continue;
      if (!r->pass) {
        pass = false;
        (r->expected_fail ? documented : unexpected) = true;
      }
    }
    const char* verdict = pass          ? "PASS"
                          : unexpected  ? "FAIL"
                                        : "FAIL (documented: published optimum defect)";
    std::printf("criterion %2d: %-40s [%.1fs]\n", criterion, verdict, seconds);
    for (const TargetRow* r : list) {
      if (r->informational || r->pass) continue;
      std::printf("              %-26s observed %12.6g   target %g +- %g\n", r->id.c_str(),
                  r->observed, r->target, r->tol);
    }
    if (unexpected) state_ok = false;
    // a documented miss that silently starts passing is also a state change
    for (const TargetRow* r : list)
      if (!r->informational && r->expected_fail && r->pass) {
        std::printf("              %s unexpectedly met the published target\n", r->id.c_str());
        state_ok = false;
      }
  }
  std::printf("acceptance: %s\n", state_ok ? "outcome matches the documented state"
                                           : "UNEXPECTED DEVIATION from the documented state");
  return state_ok ? 0 : 1;
}
