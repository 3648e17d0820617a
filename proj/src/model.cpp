#include "eitsim/model.hpp"

#include <cmath>
#include <numbers>

namespace eitsim {

namespace {

double binomial_sqrt(int n, int m) {
  // sqrt(n! / (m! (n-m)!)) via lgamma keeps large n finite.
  return std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0)));
}

void require_three_modes(const BasisPtr& basis) {
  if (basis->mode_count() != 3) {
    throw Error(ErrorCode::kBasisMismatch, "model bases have exactly three modes (photon, A, C)");
  }
}

}  // namespace

ModelParams ModelParams::make(double g_sqrt_n, double omega, double delta_c) {
  if (!std::isfinite(g_sqrt_n) || !std::isfinite(omega) || !std::isfinite(delta_c)) {
    throw Error(ErrorCode::kInvalidParams, "model parameters must be finite");
  }
  if (g_sqrt_n <= 0.0) throw Error(ErrorCode::kInvalidParams, "g_sqrt_n must be positive");
  if (omega < 0.0) throw Error(ErrorCode::kInvalidParams, "omega must be non-negative");
  return ModelParams{g_sqrt_n, omega, delta_c};
}

double ModelParams::epsilon() const { return std::hypot(g_sqrt_n, omega); }

ModelParams ModelParams::with_omega(double new_omega) const {
  return make(g_sqrt_n, new_omega, delta_c);
}

double mixing_angle(const ModelParams& params) { return std::atan2(params.g_sqrt_n, params.omega); }

SpectralData spectral_data(const ModelParams& params) {
  SpectralData s;
  s.theta = mixing_angle(params);
  s.epsilon = params.epsilon();
  const double dc = params.delta_c;
  const double eps2 = params.g_sqrt_n * params.g_sqrt_n + params.omega * params.omega;
  s.big_theta = std::sqrt(dc * dc + 4.0 * eps2);
  // up * down = 4 eps^2; form the smaller factor from the larger to avoid cancellation
  const double four_eps2 = 4.0 * eps2;
  const double up = dc >= 0.0 ? s.big_theta + dc : four_eps2 / (s.big_theta - dc);
  const double down = dc >= 0.0 ? four_eps2 / up : s.big_theta - dc;
  s.e_plus = 0.5 * up;
  s.e_minus = -0.5 * down;

  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  s.dark = {c, 0.0, -sn};
  s.bright = {sn, 0.0, c};

  // Q+ = alpha+ A + beta+ B,  Q- = alpha- A - beta- B
  const double alpha_plus = std::sqrt(up / (2.0 * s.big_theta));
  const double beta_plus = std::sqrt(down / (2.0 * s.big_theta));
  const double alpha_minus = beta_plus;
  const double beta_minus = alpha_plus;
  s.q_plus = {beta_plus * sn, alpha_plus, beta_plus * c};
  s.q_minus = {-beta_minus * sn, alpha_minus, -beta_minus * c};
  return s;
}

BasisPtr model_basis(int cutoff, std::optional<int> sector) {
  return Basis::enumerate(3, {cutoff, cutoff, cutoff}, sector);
}

OperatorMatrix HamiltonianTerms::assemble(const ModelParams& params) const {
  return detuning * params.delta_c + probe * params.g_sqrt_n + control * params.omega;
}

HamiltonianTerms hamiltonian_terms(const BasisPtr& basis) {
  require_three_modes(basis);
  return HamiltonianTerms{
      number_operator(basis, mode::kSpinA),
      hop(basis, mode::kPhoton, mode::kSpinA) + hop(basis, mode::kSpinA, mode::kPhoton),
      hop(basis, mode::kSpinC, mode::kSpinA) + hop(basis, mode::kSpinA, mode::kSpinC),
  };
}

OperatorMatrix build_hamiltonian(const ModelParams& params, const BasisPtr& basis) {
  return hamiltonian_terms(basis).assemble(params);
}

OperatorMatrix polariton_creation(const ModeCoefficients& coeffs, const BasisPtr& basis) {
  require_three_modes(basis);
  return ladder(basis, mode::kPhoton, LadderKind::kRaise) * coeffs.photon +
         ladder(basis, mode::kSpinA, LadderKind::kRaise) * coeffs.spin_a +
         ladder(basis, mode::kSpinC, LadderKind::kRaise) * coeffs.spin_c;
}

StateVector dark_state(int n, double theta, const BasisPtr& basis) {
  require_three_modes(basis);
  if (n < 0) throw Error(ErrorCode::kInvalidParams, "dark-state index must be non-negative");
  StateVector v(basis);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int m = 0; m <= n; ++m) {
    const Occupation tuple{n - m, 0, m};
    auto idx = basis->find(tuple);
    if (!idx) {
      throw Error(ErrorCode::kCutoffTooSmall,
                  "basis cannot hold dark state n=" + std::to_string(n));
    }
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    v.amplitudes()[static_cast<Eigen::Index>(*idx)] =
        sign * binomial_sqrt(n, m) * std::pow(c, n - m) * std::pow(s, m);
  }
  return v;
}

StateVector with_canonical_phase(const StateVector& v) {
  const Eigen::VectorXcd& amps = v.amplitudes();
  if (amps.size() == 0) return v;
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    // Ties are resolved toward the lowest index so the choice is reproducible.
    if (std::abs(amps[i]) > best_mag * (1.0 + 1e-12)) {
      best_mag = std::abs(amps[i]);
      best = i;
    }
  }
  if (best_mag == 0.0) return v;
  const Complex phase = std::conj(amps[best]) / best_mag;
  return StateVector(v.basis_ptr(), amps * phase);
}

StateVector dressed_state(int m, int k, int n, const ModelParams& params, const BasisPtr& basis,
                          PhaseConvention phase) {
  require_three_modes(basis);
  if (m < 0 || k < 0 || n < 0) throw Error(ErrorCode::kInvalidParams, "negative dressed-state label");
  const int total = m + k + n;
  BasisPtr scratch = Basis::enumerate(3, {total, total, total}, std::nullopt,
                                      [total](const Occupation& o) { return Basis::total(o) <= total; });
  const SpectralData sd = spectral_data(params);

  StateVector state = dark_state(n, sd.theta, scratch);
  const OperatorMatrix q_minus_dag = polariton_creation(sd.q_minus, scratch);
  const OperatorMatrix q_plus_dag = polariton_creation(sd.q_plus, scratch);
  double factorials = 1.0;
  for (int i = 1; i <= k; ++i) {
    state = apply(q_minus_dag, state);
    factorials *= i;
  }
  for (int i = 1; i <= m; ++i) {
    state = apply(q_plus_dag, state);
    factorials *= i;
  }
  StateVector out(scratch, state.amplitudes() / std::sqrt(factorials));
  out = out.project_onto(basis);
  return phase == PhaseConvention::kCanonical ? with_canonical_phase(out) : out;
}

double dressed_energy(int m, int k, const ModelParams& params) {
  const SpectralData s = spectral_data(params);
  return m * s.e_plus + k * s.e_minus;
}

}  // namespace eitsim
