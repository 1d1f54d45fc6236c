#ifndef PES_REGRESS_HPP
#define PES_REGRESS_HPP

#include <string>
#include <vector>

namespace pes {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double elapsed_s = 0.0;
};

/// Runs the built-in acceptance suite: one result per criterion.
std::vector<CriterionResult> run_regression_suite();

}  // namespace pes

#endif  // PES_REGRESS_HPP
