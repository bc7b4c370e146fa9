#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace popscale {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;  // one-line summary of the measured values
};

struct VerificationReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

// Runs the built-in verification suite (the known closed-form values plus the
// property suites) and streams one pass/fail line per criterion.
VerificationReport run_verification(std::ostream& log);

}  // namespace popscale
