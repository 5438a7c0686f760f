#pragma once

#include <string>
#include <vector>

namespace asmc::harness {

// Pinned tolerances of the acceptance suite.
namespace tolerance {
inline constexpr double kToyRelative = 1e-12;
inline constexpr double kToyMaxSeconds = 1e-3;
inline constexpr double kDecompositionGap = 1e-10;  // |lhs - rhs| / (1 + |lhs|)
inline constexpr double kUnbiasedRelative = 1e-10;
inline constexpr double kSampleVarianceRelative = 1e-12;
inline constexpr double kStandardErrors = 3.0;
inline constexpr double kRmsRatioLo = 2.0 * 0.7;  // RMS halves per 4x N, within 30%
inline constexpr double kRmsRatioHi = 2.0 * 1.3;
inline constexpr int kGapMaxInversions = 1;
inline constexpr double kCoverageLo = 0.92;
inline constexpr double kCoverageHi = 0.98;
inline constexpr double kCollapseFraction = 0.5;
}  // namespace tolerance

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  unsigned threads = 0;
};

struct CriterionEntry {
  int id;
  const char* title;
  bool statistical;  // Monte Carlo based, minutes rather than seconds
  CriterionResult (*run)(const CheckOptions&);
};

const std::vector<CriterionEntry>& acceptance_criteria();

/// Runs one entry, timing it and turning exceptions into failures.
CriterionResult run_criterion(const CriterionEntry& entry, const CheckOptions& options);

/// "PASS  3  title  (1.23 s)  detail"
std::string format_result(const CriterionResult& result);

}  // namespace asmc::harness
