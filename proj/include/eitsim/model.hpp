#pragma once

// Bosonized three-mode EIT model: photon a, excited spin wave A and
// metastable spin wave C under two-photon resonance.

#include <optional>

#include "eitsim/fock.hpp"

namespace eitsim {

namespace mode {
inline constexpr std::size_t kPhoton = 0;
inline constexpr std::size_t kSpinA = 1;
inline constexpr std::size_t kSpinC = 2;
}  // namespace mode

/// Frequencies are in units of a reference scale; g_sqrt_n = 1 by default.
struct ModelParams {
  double g_sqrt_n = 1.0;  // collective probe coupling g*sqrt(N)
  double omega = 1.0;     // control Rabi frequency
  double delta_c = 0.0;   // shared one-photon detuning

  /// Validating constructor: g_sqrt_n > 0, omega >= 0, all finite.
  static ModelParams make(double g_sqrt_n, double omega, double delta_c);

  double epsilon() const;
  ModelParams with_omega(double new_omega) const;
};

/// Real coefficients of a mode combination c_a * a + c_A * A + c_C * C.
struct ModeCoefficients {
  double photon = 0.0;
  double spin_a = 0.0;
  double spin_c = 0.0;
};

struct SpectralData {
  double theta = 0.0;
  double epsilon = 0.0;
  double big_theta = 0.0;  // sqrt(delta_c^2 + 4 epsilon^2)
  double e_plus = 0.0;
  double e_minus = 0.0;
  ModeCoefficients dark;     // D = a cos(theta) - C sin(theta)
  ModeCoefficients bright;   // B = a sin(theta) + C cos(theta)
  ModeCoefficients q_plus;   // normal mode with energy e_plus
  ModeCoefficients q_minus;  // normal mode with energy e_minus
};

double mixing_angle(const ModelParams& params);
SpectralData spectral_data(const ModelParams& params);

/// Three-mode basis with a common cutoff, optionally restricted to a sector.
BasisPtr model_basis(int cutoff, std::optional<int> sector = std::nullopt);

/// H = delta_c * detuning + g_sqrt_n * probe + omega * control.
struct HamiltonianTerms {
  OperatorMatrix detuning;  // A^dagger A
  OperatorMatrix probe;     // a A^dagger + a^dagger A
  OperatorMatrix control;   // A^dagger C + C^dagger A

  OperatorMatrix assemble(const ModelParams& params) const;
};

HamiltonianTerms hamiltonian_terms(const BasisPtr& basis);
OperatorMatrix build_hamiltonian(const ModelParams& params, const BasisPtr& basis);

/// Creation operator sum_i c_i a_i^dagger for a polariton with real coefficients.
OperatorMatrix polariton_creation(const ModeCoefficients& coeffs, const BasisPtr& basis);

StateVector dark_state(int n, double theta, const BasisPtr& basis);

enum class PhaseConvention {
  kCanonical,  // largest-magnitude amplitude made real positive
  kLadder,     // phase produced by (Q+^dagger)^m (Q-^dagger)^k |d_n>
};

StateVector dressed_state(int m, int k, int n, const ModelParams& params, const BasisPtr& basis,
                          PhaseConvention phase = PhaseConvention::kCanonical);

/// Eigenvalue of the dressed state: m * e_plus + k * e_minus (e_minus < 0).
double dressed_energy(int m, int k, const ModelParams& params);

StateVector with_canonical_phase(const StateVector& v);

}  // namespace eitsim
