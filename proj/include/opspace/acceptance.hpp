// The nine end-to-end acceptance criteria, runnable from the CLI (selftest)
// and from the dedicated acceptance binary.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opspace {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Reduced sample counts; tolerances are never relaxed.
  bool quick = false;
  std::uint64_t seed = 20240601;
  /// Empty means all of 1..9.
  std::vector<int> only;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "[PASS] 3 constant-two domination: ... (1.2 s)"
std::string format_line(const CriterionResult& r);

}  // namespace opspace
