#include <cstdio>
#include <cstdlib>

#include "cftdist/acceptance.hpp"

// One line per criterion; exit status 1 if any criterion fails.
// An optional argument selects a single criterion.
int main(int argc, char** argv) {
  using namespace cftdist;
  std::vector<CriterionResult> results;
  if (argc > 1) {
    results.push_back(run_criterion(std::atoi(argv[1])));
  } else {
    for (int id = 1; id <= 12; ++id) {
      results.push_back(run_criterion(id));
      std::printf("%s\n", format_result(results.back()).c_str());
      std::fflush(stdout);
    }
  }
  int failed = 0;
  for (const auto& r : results) {
    if (argc > 1) std::printf("%s\n", format_result(r).c_str());
    failed += !r.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed ? 1 : 0;
}
