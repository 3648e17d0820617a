#include "eitsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace eitsim {

namespace {

using std::numbers::pi;

bool fits_dark_state(int n, const Basis& basis) {
  for (int m = 0; m <= n; ++m) {
    if (!basis.find(Occupation{n - m, 0, m})) return false;
  }
  return true;
}

int max_total(const Basis& basis) {
  int best = 0;
  for (const auto& n : basis) best = std::max(best, Basis::total(n));
  return best;
}

// Reduced density matrix of one mode from an ensemble of pure states
// psi_n weighted by the coherences rho_nm.
DensityMatrix reduce_to_mode(const DensityMatrix& rho, const std::vector<StateVector>& kets, std::size_t kept,
                             Eigen::Index out_dim) {
  DensityMatrix out = DensityMatrix::Zero(out_dim, out_dim);
  const auto dim = rho.rows();
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index m = 0; m < dim; ++m) {
      const Complex weight = rho(n, m);
      if (weight == Complex{}) continue;
      const StateVector& left = kets[static_cast<std::size_t>(n)];
      const StateVector& right = kets[static_cast<std::size_t>(m)];
      for (std::size_t i = 0; i < left.size(); ++i) {
        const Occupation& a = left.basis()[i];
        for (std::size_t j = 0; j < right.size(); ++j) {
          const Occupation& b = right.basis()[j];
          bool same_rest = true;
          for (std::size_t q = 0; q < a.size(); ++q) {
            if (q != kept && a[q] != b[q]) {
              same_rest = false;
              break;
            }
          }
          if (!same_rest || a[kept] >= out_dim || b[kept] >= out_dim) continue;
          out(a[kept], b[kept]) += weight * left[i] * std::conj(right[j]);
        }
      }
    }
  }
  return out;
}

struct Propagator {
  OperatorMatrix fixed;    // delta_c * detuning + g_sqrt_n * probe
  OperatorMatrix control;  // multiplied by Omega(t)

  Eigen::VectorXcd rate(const Eigen::VectorXcd& psi, double omega) const {
    // d psi / dt = -i H psi
    return Complex(0.0, -1.0) * (fixed.matrix() * psi + omega * (control.matrix() * psi));
  }
};

}  // namespace

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::kLinear: return "linear";
    case ProfileKind::kCosine: return "cosine";
    case ProfileKind::kTanh: return "tanh";
  }
  return "tanh";
}

ProfileKind profile_kind_from_string(std::string_view name) {
  if (name == "linear") return ProfileKind::kLinear;
  if (name == "cosine" || name == "cosine-ramp") return ProfileKind::kCosine;
  if (name == "tanh") return ProfileKind::kTanh;
  throw Error(ErrorCode::kConfig, "unknown profile '" + std::string(name) + "'");
}

SweepProfile::SweepProfile(ProfileKind kind, double t_start, double t_end, double omega_start, double omega_end,
                           double steepness)
    : kind_(kind),
      t_start_(t_start),
      t_end_(t_end),
      omega_start_(omega_start),
      omega_end_(omega_end),
      steepness_(steepness) {
  if (!(t_end > t_start)) throw Error(ErrorCode::kInvalidParams, "sweep needs t_end > t_start");
  if (!(omega_start >= 0.0) || !(omega_end >= 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "sweep Rabi frequencies must be non-negative");
  }
  if (!(steepness > 0.0)) throw Error(ErrorCode::kInvalidParams, "tanh steepness must be positive");
}

double SweepProfile::shape(double u) const {
  switch (kind_) {
    case ProfileKind::kLinear: return 1.0 - u;
    case ProfileKind::kCosine: return 0.5 * (1.0 + std::cos(pi * u));
    case ProfileKind::kTanh:
      return 0.5 * (1.0 - std::tanh(steepness_ * (2.0 * u - 1.0)) / std::tanh(steepness_));
  }
  return 0.0;
}

double SweepProfile::shape_slope(double u) const {
  switch (kind_) {
    case ProfileKind::kLinear: return -1.0;
    case ProfileKind::kCosine: return -0.5 * pi * std::sin(pi * u);
    case ProfileKind::kTanh: {
      const double sech = 1.0 / std::cosh(steepness_ * (2.0 * u - 1.0));
      return -steepness_ * sech * sech / std::tanh(steepness_);
    }
  }
  return 0.0;
}

double SweepProfile::value(double t) const {
  const double u = std::clamp((t - t_start_) / duration(), 0.0, 1.0);
  return std::max(0.0, omega_end_ + (omega_start_ - omega_end_) * shape(u));
}

double SweepProfile::derivative(double t) const {
  if (t < t_start_ || t > t_end_) return 0.0;
  const double u = (t - t_start_) / duration();
  return (omega_start_ - omega_end_) * shape_slope(u) / duration();
}

SweepProfile SweepProfile::reversed() const {
  // Every shape satisfies f(1 - u) = 1 - f(u), so swapping the endpoints is
  // the same as running time backwards.
  return SweepProfile(kind_, t_start_, t_end_, omega_end_, omega_start_, steepness_);
}

SweepProfile write_profile(ProfileKind kind, double duration, double g_sqrt_n, double omega_max_fraction,
                           double omega_min_fraction) {
  return SweepProfile(kind, 0.0, duration, omega_max_fraction * g_sqrt_n, omega_min_fraction * g_sqrt_n);
}

ModelParams Drive::params_at(double t) const { return ModelParams::make(g_sqrt_n, profile.value(t), delta_c); }

double theta_dot(const ModelParams& params, double omega_dot) {
  const double eps = params.epsilon();
  return -params.g_sqrt_n * omega_dot / (eps * eps);
}

double adiabaticity(const ModelParams& params, double omega_dot) {
  const SpectralData s = spectral_data(params);
  const double dc = std::abs(params.delta_c);
  return params.g_sqrt_n * (s.big_theta + dc) * std::abs(omega_dot) /
         (std::sqrt(s.big_theta * (s.big_theta - dc)) * s.epsilon * s.epsilon * s.epsilon);
}

double max_adiabaticity(const Drive& drive, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 2);
  const SweepProfile& p = drive.profile;
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = p.t_start() + p.duration() * static_cast<double>(i) / static_cast<double>(samples - 1);
    worst = std::max(worst, adiabaticity(drive.params_at(t), p.derivative(t)));
  }
  return worst;
}

Complex nonadiabatic_coupling(int m, int k, int n, int l, const ModelParams& params, double omega_dot,
                              const BasisPtr& basis) {
  if (l < 0) throw Error(ErrorCode::kInvalidParams, "dark-state index must be non-negative");
  const StateVector bra = dressed_state(m, k, n, params, basis, PhaseConvention::kLadder);
  const double h = 1e-4 / std::max(1.0, std::abs(omega_dot));
  // The continuation Omega < 0 is harmless here: theta = atan2 stays smooth.
  const double theta_fwd = std::atan2(params.g_sqrt_n, params.omega + h * omega_dot);
  const double theta_bwd = std::atan2(params.g_sqrt_n, params.omega - h * omega_dot);
  const StateVector fwd = dark_state(l, theta_fwd, basis);
  const StateVector bwd = dark_state(l, theta_bwd, basis);
  const StateVector deriv(basis, (fwd.amplitudes() - bwd.amplitudes()) / (2.0 * h));
  return inner(bra, deriv);
}

double nonadiabatic_coupling_closed_form(int m, int k, int n, int l, const ModelParams& params, double omega_dot) {
  if (n != l - 1) return 0.0;
  const SpectralData s = spectral_data(params);
  const double scale = std::sqrt(static_cast<double>(l)) * theta_dot(params, omega_dot);
  if (m == 0 && k == 1) return scale * std::sqrt((s.big_theta + params.delta_c) / (2.0 * s.big_theta));
  if (m == 1 && k == 0) return -scale * std::sqrt((s.big_theta - params.delta_c) / (2.0 * s.big_theta));
  return 0.0;
}

double default_time_step(const Drive& drive, int max_excitation) {
  const SweepProfile& p = drive.profile;
  const double omega_max = std::max(p.omega_start(), p.omega_end());
  const SpectralData s = spectral_data(ModelParams::make(drive.g_sqrt_n, omega_max, drive.delta_c));
  const double radius = std::max(1, max_excitation) * std::max(std::abs(s.e_plus), std::abs(s.e_minus));
  const double dt = std::min(0.02 / radius, 0.05 / s.epsilon);
  const double steps = std::ceil(p.duration() / dt);
  return p.duration() / steps;
}

double dark_manifold_fidelity(const StateVector& state, double theta) {
  const Basis& basis = state.basis();
  double weight = 0.0;
  for (int n = 0; n <= max_total(basis); ++n) {
    if (!fits_dark_state(n, basis)) continue;
    weight += std::norm(inner(dark_state(n, theta, state.basis_ptr()), state));
  }
  return weight;
}

Trajectory evolve(const StateVector& initial, const Drive& drive, const EvolveOptions& options) {
  const SweepProfile& profile = drive.profile;
  const BasisPtr& basis = initial.basis_ptr();
  const HamiltonianTerms terms = hamiltonian_terms(basis);
  const Propagator prop{terms.detuning * drive.delta_c + terms.probe * drive.g_sqrt_n, terms.control};

  const double dt_request = options.dt > 0.0 ? options.dt : default_time_step(drive, max_total(*basis));
  const auto steps = static_cast<std::size_t>(std::ceil(profile.duration() / dt_request - 1e-9));
  const double dt = profile.duration() / static_cast<double>(steps);

  const std::size_t sample_count = std::max<std::size_t>(options.sample_count, 2);
  std::vector<std::size_t> sample_steps;
  for (std::size_t j = 0; j < sample_count; ++j) {
    const auto s = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * static_cast<double>(steps) / static_cast<double>(sample_count - 1)));
    if (sample_steps.empty() || s != sample_steps.back()) sample_steps.push_back(s);
  }

  Trajectory traj{{}, {}, initial, steps, 0.0};
  const double norm0 = initial.amplitudes().norm();
  Eigen::VectorXcd psi = initial.amplitudes();

  auto record = [&](double t) {
    const ModelParams params = drive.params_at(t);
    const double theta = mixing_angle(params);
    StateVector snap(basis, psi);
    traj.samples.push_back({t, params.omega, theta, adiabaticity(params, profile.derivative(t)),
                            dark_manifold_fidelity(snap, theta) / (norm0 * norm0)});
    if (options.keep_snapshots) traj.snapshots.push_back(std::move(snap));
  };

  std::size_t next_sample = 0;
  for (std::size_t step = 0;; ++step) {
    const double t = profile.t_start() + dt * static_cast<double>(step);
    if (next_sample < sample_steps.size() && sample_steps[next_sample] == step) {
      record(t);
      ++next_sample;
    }
    if (step == steps) break;

    const double w0 = profile.value(t);
    const double w_mid = profile.value(t + 0.5 * dt);
    const double w1 = profile.value(t + dt);
    const Eigen::VectorXcd k1 = prop.rate(psi, w0);
    const Eigen::VectorXcd k2 = prop.rate(psi + 0.5 * dt * k1, w_mid);
    const Eigen::VectorXcd k3 = prop.rate(psi + 0.5 * dt * k2, w_mid);
    const Eigen::VectorXcd k4 = prop.rate(psi + dt * k3, w1);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double drift = std::abs(psi.norm() - norm0);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    if (drift > kStepTooLargeDrift) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " at t=" << t + dt << " with dt=" << dt;
      throw Error(ErrorCode::kStepTooLarge, msg.str());
    }
  }
  traj.final_state = StateVector(basis, psi);
  return traj;
}

void validate_density_matrix(const DensityMatrix& rho) {
  if (rho.rows() == 0 || rho.rows() != rho.cols()) {
    throw Error(ErrorCode::kInvalidDensityMatrix, "density matrix must be square and non-empty");
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kTraceTolerance) throw Error(ErrorCode::kInvalidDensityMatrix, "density matrix is not Hermitian");
  const Complex trace = rho.trace();
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    throw Error(ErrorCode::kInvalidDensityMatrix, "density matrix trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPositivityTolerance) {
    throw Error(ErrorCode::kInvalidDensityMatrix, "density matrix is not positive semidefinite");
  }
}

double state_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kBasisMismatch, "density matrices differ in dimension");
  }
  Eigen::SelfAdjointEigenSolver<DensityMatrix> ea(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd root = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const DensityMatrix sqrt_a = ea.eigenvectors() * root.asDiagonal() * ea.eigenvectors().adjoint();
  const DensityMatrix inner_m = sqrt_a * b * sqrt_a;
  Eigen::SelfAdjointEigenSolver<DensityMatrix> em(0.5 * (inner_m + inner_m.adjoint()), Eigen::EigenvaluesOnly);
  const double tr = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

namespace {

enum class Direction { kWrite, kRead };

TransferResult transfer(const DensityMatrix& rho, const Drive& drive, const EvolveOptions& options,
                        Direction direction) {
  validate_density_matrix(rho);
  const SweepProfile& p = drive.profile;
  const double closed_omega = direction == Direction::kWrite ? p.omega_end() : p.omega_start();
  const double closed_theta = std::atan2(drive.g_sqrt_n, closed_omega);
  if (std::abs(closed_theta - pi / 2) > kClosingAngleTolerance) {
    std::ostringstream msg;
    msg << (direction == Direction::kWrite ? "write sweep ends" : "read sweep starts") << " at theta="
        << closed_theta << ", more than " << kClosingAngleTolerance << " rad from pi/2";
    throw Error(ErrorCode::kProfileNotClosing, msg.str());
  }

  const auto dim = rho.rows();
  const int top = static_cast<int>(dim) - 1;
  EvolveOptions opts = options;
  if (opts.dt <= 0.0) opts.dt = default_time_step(drive, top);
  opts.keep_snapshots = false;

  const std::size_t source_mode = direction == Direction::kWrite ? mode::kPhoton : mode::kSpinC;
  const std::size_t kept_mode = direction == Direction::kWrite ? mode::kSpinC : mode::kPhoton;

  TransferResult result;
  std::vector<StateVector> finals;
  for (int n = 0; n <= top; ++n) {
    BasisPtr sector = model_basis(n, n);
    Occupation start{0, 0, 0};
    start[source_mode] = n;
    const StateVector ket = StateVector::basis_state(sector, start);
    const bool needed = rho.row(n).cwiseAbs().maxCoeff() > 0.0 || rho.col(n).cwiseAbs().maxCoeff() > 0.0;
    Occupation target{0, 0, 0};
    target[kept_mode] = n;
    if (!needed) {
      finals.push_back(ket);
      result.ket_fidelity.push_back(1.0);
      continue;
    }
    Trajectory traj = evolve(ket, drive, opts);
    const double weight = rho(n, n).real();
    if (result.samples.empty()) {
      result.samples = traj.samples;
      for (auto& s : result.samples) s.dark_fidelity = 0.0;
    }
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      result.samples[i].dark_fidelity += weight * traj.samples[i].dark_fidelity;
    }
    result.ket_fidelity.push_back(std::norm(traj.final_state.amplitude(target)));
    finals.push_back(traj.final_state);
  }
  for (const auto& s : result.samples) result.max_eta = std::max(result.max_eta, s.eta);
  result.max_eta = std::max(result.max_eta, max_adiabaticity(drive));
  result.output = reduce_to_mode(rho, finals, kept_mode, dim);
  // Remove the (<= 1e-6) integrator norm drift so the output is a valid state.
  result.output /= result.output.trace().real();
  result.output = 0.5 * (result.output + result.output.adjoint()).eval();
  return result;
}

}  // namespace

double TransferResult::worst_infidelity() const {
  double worst = 0.0;
  for (double f : ket_fidelity) worst = std::max(worst, 1.0 - f);
  return worst;
}

TransferResult store(const DensityMatrix& rho_probe, const Drive& drive, const EvolveOptions& options) {
  return transfer(rho_probe, drive, options, Direction::kWrite);
}

TransferResult retrieve(const DensityMatrix& rho_spinwave, const Drive& drive, const EvolveOptions& options) {
  return transfer(rho_spinwave, drive, options, Direction::kRead);
}

}  // namespace eitsim
