// Acceptance battery: ten self-contained checks with pinned inputs and
// tolerances, each returning one pass/fail line. Suites group them:
//   mde       {1, 2, 8}   fixed-point solver against closed forms
//   cumulants {3, 4}      combinatorial engine against oracles
//   rate      {5, 6, 7, 9} the certified bound and its decay exponent
//   all       {1..10}     everything plus the global resolvent-cap audit
#pragma once

#include <string>
#include <vector>

namespace freeclt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CriterionResult> run_acceptance(const std::string& suite);

// "[PASS] c1 <name>: <detail> (<seconds> s)" per criterion.
std::string format_results(const std::vector<CriterionResult>& results);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace freeclt
