#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace eitsim::cli {

enum class Comparison { kAtMost, kAtLeast };

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::kAtMost;
  bool passed = false;
  std::string error;  // non-empty when the check threw instead of measuring
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  double max_eta = 0.0;
  std::string regime;

  bool passed() const;
  /// Deterministic JSON: config echo, regime information, then checks in run order.
  std::string to_json(const RunConfig& config) const;
};

/// Adiabatic regime label for a write sweep's peak adiabaticity.
std::string regime_for(double max_eta);

inline constexpr double kAdiabaticEta = 0.05;
inline constexpr double kNonadiabaticEta = 1.0;

/// Runs every invariant check against an already validated config.
VerifyReport run_verify(const RunConfig& config);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace eitsim::cli
