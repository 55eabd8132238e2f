#pragma once

#include <string>
#include <vector>

namespace bivadj::report {

/// One reproduction target: an observed value checked against target +- tol.
struct TargetRow {
  int criterion = 0;
  std::string id;
  double observed = 0.0;
  double target = 0.0;
  double tol = 0.0;
  bool pass = false;
  /// Labeled variant shown for comparison; never gates.
  bool informational = false;
  /// Documented irreproducible published value (the reported seeds optimum
  /// is not a stationary point of its own likelihood); printed as a failure,
  /// but the acceptance suite treats the mismatch as the expected state.
  bool expected_fail = false;
  std::string note;
  double seconds = 0.0;
};

struct Options {
  bool censored_tail = false;     // add censored-tail variant rows
  std::vector<int> only;          // run a subset of criteria (empty: all)
};

std::vector<TargetRow> run_all(const Options& opt = {});

/// True when every gating row passes.
bool all_pass(const std::vector<TargetRow>& rows);
/// True when every gating row either passes or is a documented miss.
bool matches_documented_state(const std::vector<TargetRow>& rows);

std::string render_text(const std::vector<TargetRow>& rows);

}  // namespace bivadj::report
