// Acceptance gate: runs every criterion and prints one line per result.
// Exit status is the number of failing criteria.
#include <cstdio>

#include "pes/regress.hpp"

int main() {
  const auto results = pes::run_regression_suite();
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-28s (%.2fs) %s\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.elapsed_s, r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%zu criteria, %d failing\n", results.size(), failures);
  return failures;
}
