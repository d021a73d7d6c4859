#pragma once

#include <cstddef>
#include <string>

#include "supdiff/harness.hpp"

namespace supdiff {

inline constexpr int kCriterionCount = 12;

struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs acceptance criterion `id` (1..12). Throws ValidationError for an
/// unknown id.
CriterionOutcome run_criterion(int id, std::size_t threads = 0);

/// "PASS <id> <title>: <detail> [<seconds> s]" (FAIL when not passed).
std::string format_outcome(const CriterionOutcome& outcome);

/// Experiment configuration used by criteria 3-9.
ExperimentConfig criterion_config(int id);

/// 50-member class of indicators and ramps used by criterion 9.
FiniteFunctionClass indicator_ramp_class();

}  // namespace supdiff
