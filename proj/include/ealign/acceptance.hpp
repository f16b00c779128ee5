// The shipped verification cases, one per quantitative target, shared by the
// acceptance test suite and the `reproduce` CLI subcommand. Scenario runs are
// cached so several criteria can reuse one trajectory.
#pragma once

#include <string>
#include <vector>

namespace ealign::acceptance {

inline constexpr int kCriteria = 11;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

std::string criterion_name(int id);
CriterionResult run_criterion(int id);

// Density-bound (1.15) checks across the shipped 1D scenarios plus the
// Frostman ball-mass bound on the Cantor concentration measure.
CriterionResult run_invariant_checks();

// Maps a reproduce-case name ("oracle", "cantor-k1", …, or "all") to
// criterion ids; throws on unknown names.
std::vector<int> criteria_for_case(const std::string& name);
std::vector<std::string> case_names();

void clear_cache();

}  // namespace ealign::acceptance
