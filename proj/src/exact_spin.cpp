#include "eitsim/exact_spin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace eitsim {

namespace {

constexpr std::size_t kPhotonMode = 0;
constexpr std::size_t kExcitedMode = 1;
constexpr std::size_t kStorageMode = 2;

bool in_window(const Occupation& n) { return n[kExcitedMode] + n[kStorageMode] <= kLowExcitationWindow; }

Eigen::VectorXcd flatten(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

}  // namespace

ExactBasis make_exact_basis(int n_atoms, int photon_cutoff, std::optional<int> sector,
                            std::size_t dimension_limit) {
  if (n_atoms < 1) throw Error(ErrorCode::kInvalidParams, "n_atoms must be at least 1");
  if (photon_cutoff < 0) throw Error(ErrorCode::kInvalidParams, "photon_cutoff must be non-negative");
  // (photon_cutoff + 1) * (N + 1)(N + 2) / 2 before any sector restriction.
  const double full = (photon_cutoff + 1.0) * (n_atoms + 1.0) * (n_atoms + 2.0) / 2.0;
  if (!sector && full > static_cast<double>(dimension_limit)) {
    throw Error(ErrorCode::kDimensionOverflow,
                "exact basis of dimension " + std::to_string(static_cast<long long>(full)) +
                    " exceeds the limit " + std::to_string(dimension_limit));
  }
  ExactBasis out;
  out.n_atoms = n_atoms;
  out.photon_cutoff = photon_cutoff;
  out.basis = Basis::enumerate(3, {photon_cutoff, n_atoms, n_atoms}, sector, [n_atoms](const Occupation& n) {
    return n[kExcitedMode] + n[kStorageMode] <= n_atoms;
  });
  if (out.basis->dimension() > dimension_limit) {
    throw Error(ErrorCode::kDimensionOverflow, "exact basis exceeds the dimension limit");
  }
  return out;
}

ExactOperators build_exact_operators(const ExactBasis& eb) {
  const BasisPtr& basis = eb.basis;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(eb.n_atoms));

  // A^dagger = a^dagger b / sqrt(N)
  OperatorMatrix a_raise = build_operator(basis, [&](const Occupation& n, const EmitFn& emit) {
    const int nb = eb.ground_count(n);
    if (nb == 0) return;
    Occupation t = n;
    t[kExcitedMode] += 1;
    emit(t, std::sqrt((n[kExcitedMode] + 1.0) * nb) * inv_sqrt_n);
  });
  // C^dagger = c^dagger b / sqrt(N)
  OperatorMatrix c_raise = build_operator(basis, [&](const Occupation& n, const EmitFn& emit) {
    const int nb = eb.ground_count(n);
    if (nb == 0) return;
    Occupation t = n;
    t[kStorageMode] += 1;
    emit(t, std::sqrt((n[kStorageMode] + 1.0) * nb) * inv_sqrt_n);
  });
  OperatorMatrix t_plus = hop(basis, kStorageMode, kExcitedMode);
  OperatorMatrix t_3 = build_operator(basis, [](const Occupation& n, const EmitFn& emit) {
    emit(n, 0.5 * (n[kExcitedMode] - n[kStorageMode]));
  });
  OperatorMatrix a_lower = a_raise.adjoint();
  OperatorMatrix c_lower = c_raise.adjoint();
  OperatorMatrix t_minus = t_plus.adjoint();
  return ExactOperators{std::move(a_lower), std::move(a_raise), std::move(c_lower), std::move(c_raise),
                        std::move(t_plus),  std::move(t_minus), std::move(t_3),
                        number_operator(basis, kExcitedMode)};
}

OperatorMatrix build_exact_hamiltonian(const ModelParams& params, const ExactBasis& eb) {
  if (eb.basis->mode_count() != 3) throw Error(ErrorCode::kBasisMismatch, "exact basis must have three modes");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(eb.n_atoms));
  return build_operator(eb.basis, [&](const Occupation& n, const EmitFn& emit) {
    const int np = n[kPhotonMode];
    const int na = n[kExcitedMode];
    const int nc = n[kStorageMode];
    const int nb = eb.ground_count(n);
    emit(n, params.delta_c * na);
    // a A^dagger: photon absorbed, b -> a
    if (np > 0 && nb > 0) {
      emit({np - 1, na + 1, nc}, params.g_sqrt_n * std::sqrt(np * (na + 1.0) * nb) * inv_sqrt_n);
    }
    // a^dagger A: a -> b, photon emitted
    if (na > 0) {
      emit({np + 1, na - 1, nc}, params.g_sqrt_n * std::sqrt((np + 1.0) * na * (nb + 1.0)) * inv_sqrt_n);
    }
    // T+ : c -> a,  T- : a -> c
    if (nc > 0) emit({np, na + 1, nc - 1}, params.omega * std::sqrt((na + 1.0) * nc));
    if (na > 0) emit({np, na - 1, nc + 1}, params.omega * std::sqrt(na * (nc + 1.0)));
  });
}

double CommutatorDefectReport::worst_exact() const {
  double worst = 0.0;
  for (const auto& e : exact_relations) worst = std::max(worst, e.norm);
  return worst;
}

CommutatorDefectReport commutator_defect(int n_atoms) {
  const ExactBasis eb = make_exact_basis(n_atoms, 0);
  const ExactOperators op = build_exact_operators(eb);
  const OperatorMatrix id = OperatorMatrix::identity(eb.basis);
  const double inv_n = 1.0 / n_atoms;

  CommutatorDefectReport report;
  report.n_atoms = n_atoms;
  auto add = [&](std::string name, const OperatorMatrix& m) {
    report.exact_relations.push_back({std::move(name), spectral_norm(m.dense())});
  };
  add("[A,C]", commutator(op.a_lower, op.c_lower));
  add("[A,C+] + T-/N", commutator(op.a_lower, op.c_raise) + op.t_minus * inv_n);
  add("[T-,C] + A", commutator(op.t_minus, op.c_lower) + op.a_lower);
  add("[T-,C+]", commutator(op.t_minus, op.c_raise));
  add("[T-,A]", commutator(op.t_minus, op.a_lower));
  add("[T-,A+] - C+", commutator(op.t_minus, op.a_raise) - op.c_raise);
  add("[S,A] + A", commutator(op.s, op.a_lower) + op.a_lower);
  add("[S,A+] - A+", commutator(op.s, op.a_raise) - op.a_raise);
  add("[S,C]", commutator(op.s, op.c_lower));
  add("[S,C+]", commutator(op.s, op.c_raise));
  add("[S,T+] - T+", commutator(op.s, op.t_plus) - op.t_plus);
  add("[S,T-] + T-", commutator(op.s, op.t_minus) + op.t_minus);

  report.boson_aa_defect = spectral_norm(restrict_to(commutator(op.a_lower, op.a_raise) - id, in_window));
  report.boson_ac_defect = spectral_norm(restrict_to(commutator(op.a_lower, op.c_raise), in_window));

  const std::vector<const OperatorMatrix*> h2{&op.a_lower, &op.a_raise, &op.c_lower, &op.c_raise};
  const std::vector<const OperatorMatrix*> su2{&op.t_plus, &op.t_minus, &op.t_3};
  Eigen::MatrixXcd span(restrict_to(op.a_lower, in_window).size(), static_cast<Eigen::Index>(h2.size()));
  for (std::size_t j = 0; j < h2.size(); ++j) {
    span.col(static_cast<Eigen::Index>(j)) = flatten(restrict_to(*h2[j], in_window));
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(span);
  for (const auto* g : su2) {
    for (const auto* h : h2) {
      const Eigen::VectorXcd target = flatten(restrict_to(commutator(*g, *h), in_window));
      const Eigen::VectorXcd coeffs = qr.solve(target);
      report.closure_residual = std::max(report.closure_residual, (span * coeffs - target).norm());
    }
  }
  return report;
}

StateVector embed_dark_state(int n, double theta, const ExactBasis& eb) {
  // The exact basis uses the same (photon, n_a, n_c) layout as the bosonic
  // model and the same binomial weights.
  if (n > eb.n_atoms) throw Error(ErrorCode::kCutoffTooSmall, "dark state needs n <= N");
  return dark_state(n, theta, eb.basis);
}

BosonicDefect bosonic_defect(int n_atoms, int n, const ModelParams& params) {
  if (n < 0) throw Error(ErrorCode::kInvalidParams, "n must be non-negative");
  if (n > n_atoms) throw Error(ErrorCode::kCutoffTooSmall, "dark state needs n <= N");
  const ExactBasis eb = make_exact_basis(n_atoms, n, n);
  const double theta = mixing_angle(params);
  const double eps = params.epsilon();
  const StateVector dark = embed_dark_state(n, theta, eb);
  const OperatorMatrix h = build_exact_hamiltonian(params, eb);

  BosonicDefect out;
  out.nullity_residual = norm(apply(h, dark)) / eps;

  const auto pairs = eigendecompose(h);
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    if (std::abs(p.value) < std::abs(nearest)) nearest = p.value;
  }
  // Overlap with the whole (possibly degenerate) eigenspace nearest to zero.
  const double cluster = 1e-8 * eps;
  for (const auto& p : pairs) {
    if (std::abs(p.value - nearest) <= cluster) out.fidelity += std::norm(inner(p.vector, dark));
  }
  return out;
}

}  // namespace eitsim
