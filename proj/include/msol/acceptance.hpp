#pragma once

#include <string>
#include <vector>

namespace msol {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

/// Number of acceptance criteria.
inline constexpr int kCriterionCount = 9;

/// Runs one criterion (1-based id). Numerical failures and exceptions both
/// come back as pass = false with the reason in `detail`.
CriterionResult run_criterion(int id);

/// Runs the listed criteria (all when empty) in id order.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

/// One line: "PASS  3  minimality vs return-map classification  ... (0.41 s / 30 s)".
std::string format_criterion(const CriterionResult& r);

}  // namespace msol
