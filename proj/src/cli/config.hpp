#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eitsim/dynamics.hpp"
#include "eitsim/model.hpp"

namespace eitsim::cli {

struct RhoEntry {
  int n = 0;
  int m = 0;
  double re = 0.0;
  double im = 0.0;
};

/// Flat key = value configuration shared by every subcommand.
struct RunConfig {
  double g_sqrt_n = 1.0;
  double omega = 1.0;
  double delta_c = 0.0;
  int n_atoms = 16;
  int cutoff = 4;
  int sector = 1;
  int n = 1;
  int m = 0;
  int k = 0;
  double dt = 0.0;  // 0 selects the automatic step
  ProfileKind profile = ProfileKind::kTanh;
  double duration = 100.0;
  double omega_max = kDefaultOmegaMaxFraction;  // in units of g_sqrt_n
  double omega_min = kClosedOmegaFraction;      // in units of g_sqrt_n
  double steepness = SweepProfile::kDefaultSteepness;
  std::vector<double> durations;  // sweep grid; empty means {duration}
  std::vector<double> delta_cs;   // sweep grid; empty means {delta_c}
  std::vector<RhoEntry> rho{{0, 0, 0.5, 0.0}, {0, 1, 0.5, 0.0}, {1, 0, 0.5, 0.0}, {1, 1, 0.5, 0.0}};
  unsigned seed = 1;
  std::map<std::string, double> tolerances;  // "tol.<check>" overrides
  std::string summary;                       // optional JSON summary path for store-retrieve

  /// Applies one key/value pair. Throws Error(kConfig) naming the key.
  void set(const std::string& key, const std::string& value);

  /// Sorted `key = value` lines; parse(canonical()) reproduces it byte for byte.
  std::string canonical() const;

  /// Checks physical and structural constraints; throws Error(kConfig) or
  /// Error(kCutoffTooSmall) with the offending field name first.
  void validate() const;

  ModelParams params() const;
  Drive write_drive(double duration_override, double delta_c_override) const;
  DensityMatrix density_matrix() const;
};

RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

}  // namespace eitsim::cli
