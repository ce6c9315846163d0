#pragma once

#include <string>
#include <vector>

namespace cftdist {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = true;
  // worst part, measured by achieved / tolerance
  double achieved = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

// Runs criterion `id` in 1..12.
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_acceptance();
// f_n (n = 2, 3) welding against the closed form and the Gaussian MGF.
std::vector<CriterionResult> run_quick_selftest();

std::string format_result(const CriterionResult& r);

}  // namespace cftdist
