#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace eitsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SweepRow {
  double duration = 0.0;
  double delta_c = 0.0;
  double max_eta = 0.0;
  double final_infidelity = 0.0;
};

/// Evaluates the duration x delta_c grid on a worker pool; rows sorted by (delta_c, duration).
std::vector<SweepRow> run_sweep(const RunConfig& config);

/// Worker count: EITSIM_THREADS if set to a positive integer, else the hardware concurrency.
unsigned worker_count(std::size_t jobs);

}  // namespace eitsim::cli
