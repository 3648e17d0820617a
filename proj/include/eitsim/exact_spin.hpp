#pragma once

// Exact finite-N collective engine in the fully symmetric (Dicke) sector.
// Atoms are encoded by Schwinger occupations (n_a, n_b, n_c) with
// n_a + n_b + n_c = N; only (n_photon, n_a, n_c) is stored, n_b is implied.

#include <optional>
#include <string>
#include <vector>

#include "eitsim/fock.hpp"
#include "eitsim/model.hpp"

namespace eitsim {

inline constexpr std::size_t kDefaultExactDimensionLimit = 200000;

struct ExactBasis {
  int n_atoms = 1;
  int photon_cutoff = 0;
  BasisPtr basis;  // tuples (n_photon, n_a, n_c), n_a + n_c <= n_atoms

  int ground_count(const Occupation& n) const { return n_atoms - n[1] - n[2]; }
};

ExactBasis make_exact_basis(int n_atoms, int photon_cutoff, std::optional<int> sector = std::nullopt,
                            std::size_t dimension_limit = kDefaultExactDimensionLimit);

struct ExactOperators {
  OperatorMatrix a_lower;  // A   = b^dagger a / sqrt(N)
  OperatorMatrix a_raise;  // A^dagger
  OperatorMatrix c_lower;  // C   = b^dagger c / sqrt(N)
  OperatorMatrix c_raise;  // C^dagger
  OperatorMatrix t_plus;   // a^dagger c
  OperatorMatrix t_minus;  // c^dagger a
  OperatorMatrix t_3;      // (n_a - n_c) / 2
  OperatorMatrix s;        // n_a
};

ExactOperators build_exact_operators(const ExactBasis& basis);

/// H = delta_c S + g_sqrt_n (a A^dagger + a^dagger A) + omega (T+ + T-).
OperatorMatrix build_exact_hamiltonian(const ModelParams& params, const ExactBasis& basis);

struct DefectEntry {
  std::string relation;
  double norm = 0.0;
};

struct CommutatorDefectReport {
  int n_atoms = 0;
  // Relations that hold exactly in the Schwinger representation, measured on
  // the whole symmetric space.
  std::vector<DefectEntry> exact_relations;
  // ||[A,A^dagger] - 1|| and ||[A,C^dagger]|| on the n_a + n_c <= 2 window.
  double boson_aa_defect = 0.0;
  double boson_ac_defect = 0.0;
  // Largest least-squares residual of [su(2) generator, h2 generator]
  // against span{A, A^dagger, C, C^dagger} on the same window.
  double closure_residual = 0.0;

  double worst_exact() const;
};

inline constexpr int kLowExcitationWindow = 2;

CommutatorDefectReport commutator_defect(int n_atoms);

/// Embeds the bosonic dark state into the exact basis, mapping the C-mode
/// Fock state |m> onto the normalized Dicke state with n_c = m.
StateVector embed_dark_state(int n, double theta, const ExactBasis& basis);

struct BosonicDefect {
  double nullity_residual = 0.0;  // ||H_exact |d_n>|| / epsilon
  double fidelity = 0.0;          // overlap with the closest exact zero mode
};

BosonicDefect bosonic_defect(int n_atoms, int n, const ModelParams& params);

}  // namespace eitsim
