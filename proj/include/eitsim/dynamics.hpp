#pragma once

// Time-dependent control: sweep profiles, fixed-step RK4 propagation,
// adiabaticity monitoring and the photon <-> spin-wave write/read maps.

#include <string_view>
#include <vector>

#include "eitsim/fock.hpp"
#include "eitsim/model.hpp"

namespace eitsim {

enum class ProfileKind { kLinear, kCosine, kTanh };

std::string_view to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(std::string_view name);

/// Control Rabi frequency Omega(t) on [t_start, t_end], held constant outside.
/// The tanh ramp is rescaled so that it hits omega_start and omega_end exactly:
///   Omega = omega_end + (omega_start - omega_end) * (1 - tanh(s)/tanh(k)) / 2,
///   s = k * (2 (t - t_start) / T - 1).
class SweepProfile {
 public:
  static constexpr double kDefaultSteepness = 3.0;

  SweepProfile(ProfileKind kind, double t_start, double t_end, double omega_start, double omega_end,
               double steepness = kDefaultSteepness);

  ProfileKind kind() const { return kind_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t_start_; }
  double omega_start() const { return omega_start_; }
  double omega_end() const { return omega_end_; }
  double steepness() const { return steepness_; }

  double value(double t) const;
  double derivative(double t) const;

  /// Same shape traversed backwards in time (read after write).
  SweepProfile reversed() const;

 private:
  // Shape function f(u) running from 1 at u = 0 to 0 at u = 1, and df/du.
  double shape(double u) const;
  double shape_slope(double u) const;

  ProfileKind kind_;
  double t_start_;
  double t_end_;
  double omega_start_;
  double omega_end_;
  double steepness_;
};

/// Omega_end used when a sweep should close the photon channel: exact zero is
/// never reached by the tanh family.
inline constexpr double kClosedOmegaFraction = 1e-6;
inline constexpr double kDefaultOmegaMaxFraction = 10.0;
inline constexpr double kClosingAngleTolerance = 1e-3;

/// A write sweep theta: ~0 -> pi/2 (Omega from omega_max down to omega_min).
SweepProfile write_profile(ProfileKind kind, double duration, double g_sqrt_n,
                           double omega_max_fraction = kDefaultOmegaMaxFraction,
                           double omega_min_fraction = kClosedOmegaFraction);

struct Drive {
  double g_sqrt_n = 1.0;
  double delta_c = 0.0;
  SweepProfile profile;

  ModelParams params_at(double t) const;
};

/// Signed d(theta)/dt = -g_sqrt_n * omega_dot / epsilon^2.
double theta_dot(const ModelParams& params, double omega_dot);

/// eta = g_sqrt_n (Theta + |dc|) |omega_dot| / (sqrt(Theta (Theta - |dc|)) epsilon^3).
double adiabaticity(const ModelParams& params, double omega_dot);

/// max_t eta(t) sampled on a uniform grid (endpoints included).
double max_adiabaticity(const Drive& drive, std::size_t samples = 20001);

/// <e(m,k;n)| d/dt |d_l> at the instant described by (params, omega_dot).
/// The time derivative is a central finite difference of the dark state along
/// Omega(t +- h) = Omega +- h omega_dot; dressed states carry ladder phase.
Complex nonadiabatic_coupling(int m, int k, int n, int l, const ModelParams& params, double omega_dot,
                              const BasisPtr& basis);

/// Closed form of the same coupling.
double nonadiabatic_coupling_closed_form(int m, int k, int n, int l, const ModelParams& params,
                                         double omega_dot);

struct Sample {
  double t = 0.0;
  double omega = 0.0;
  double theta = 0.0;
  double eta = 0.0;
  double dark_fidelity = 0.0;  // weight of the state inside the instantaneous dark manifold
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<StateVector> snapshots;  // aligned with samples
  StateVector final_state;
  std::size_t steps = 0;
  double max_norm_drift = 0.0;
};

struct EvolveOptions {
  double dt = 0.0;               // <= 0 selects default_time_step
  std::size_t sample_count = 201;  // evenly spaced in step index, endpoints included
  bool keep_snapshots = true;
};

inline constexpr double kStepTooLargeDrift = 1e-6;

/// Step size with spectral_radius(H) * dt <= 0.02 over the whole sweep, where
/// the radius is bounded by max_excitation * max(|e+|, |e-|) at the largest
/// Omega. Always satisfies epsilon * dt <= 0.05.
double default_time_step(const Drive& drive, int max_excitation);

/// Integrates i d|psi>/dt = H(Omega(t)) |psi> with classical RK4 from
/// profile.t_start() to profile.t_end(). Throws StepTooLarge when the norm
/// drifts by more than 1e-6.
Trajectory evolve(const StateVector& initial, const Drive& drive, const EvolveOptions& options = {});

/// Weight of `state` on the dark states d_0 ... d_max that fit its basis.
double dark_manifold_fidelity(const StateVector& state, double theta);

// --- density-matrix maps -------------------------------------------------

using DensityMatrix = Eigen::MatrixXcd;

inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;

/// Throws InvalidDensityMatrix unless rho is square, Hermitian, unit trace
/// (1e-12) and positive semidefinite (min eigenvalue >= -1e-10).
void validate_density_matrix(const DensityMatrix& rho);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
double state_fidelity(const DensityMatrix& a, const DensityMatrix& b);

struct TransferResult {
  DensityMatrix output;
  /// Ensemble trajectory: dark_fidelity is the rho_nn-weighted average of
  /// the per-ket values; snapshots are not kept.
  std::vector<Sample> samples;
  double max_eta = 0.0;
  /// Per source ket n: probability that |n> ended in the target |n> of the
  /// other channel with every remaining mode empty. Unused kets report 1.
  std::vector<double> ket_fidelity;

  /// 1 - min(ket_fidelity): the bound used for the (-1)^(n+m) contract.
  double worst_infidelity() const;
};

/// Write map: probe photon state -> C spin-wave state. Each |n>_p (atoms in
/// |b^N>) is evolved in its own excitation sector; the output is the reduced
/// density matrix of the C mode.
TransferResult store(const DensityMatrix& rho_probe, const Drive& drive, const EvolveOptions& options = {});

/// Read map: C spin-wave state -> probe photon state, with the drive running
/// theta from pi/2 towards 0. Output is the reduced photon density matrix.
TransferResult retrieve(const DensityMatrix& rho_spinwave, const Drive& drive,
                        const EvolveOptions& options = {});

}  // namespace eitsim
