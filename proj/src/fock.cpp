#include "eitsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace eitsim {

namespace {

void enumerate_into(std::size_t mode, const std::vector<int>& cutoffs, std::optional<int> sector,
                    int used, Occupation& current, std::vector<Occupation>& out) {
  if (mode == cutoffs.size()) {
    if (!sector || used == *sector) out.push_back(current);
    return;
  }
  int top = cutoffs[mode];
  if (sector) top = std::min(top, *sector - used);
  for (int n = top; n >= 0; --n) {
    current[mode] = n;
    enumerate_into(mode + 1, cutoffs, sector, used + n, current, out);
  }
}

}  // namespace

std::shared_ptr<const Basis> Basis::enumerate(std::size_t mode_count, std::vector<int> cutoffs,
                                              std::optional<int> sector, const Filter& keep) {
  if (mode_count == 0 || cutoffs.size() != mode_count) {
    throw Error(ErrorCode::kInvalidParams, "cutoff list must have one entry per mode");
  }
  if (std::any_of(cutoffs.begin(), cutoffs.end(), [](int c) { return c < 0; })) {
    throw Error(ErrorCode::kInvalidParams, "cutoffs must be non-negative");
  }
  if (sector && *sector < 0) throw Error(ErrorCode::kEmptySector, "negative sector");

  std::shared_ptr<Basis> basis(new Basis());
  basis->cutoffs_ = std::move(cutoffs);
  basis->sector_ = sector;

  std::vector<Occupation> all;
  Occupation scratch(mode_count, 0);
  enumerate_into(0, basis->cutoffs_, sector, 0, scratch, all);
  for (auto& n : all) {
    if (!keep || keep(n)) basis->states_.push_back(std::move(n));
  }
  if (basis->states_.empty()) {
    throw Error(ErrorCode::kEmptySector, "no occupation tuple satisfies the cutoffs and sector");
  }
  for (std::size_t i = 0; i < basis->states_.size(); ++i) basis->index_.emplace(basis->states_[i], i);
  return basis;
}

std::optional<std::size_t> Basis::find(const Occupation& n) const {
  auto it = index_.find(n);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Basis::total(const Occupation& n) { return std::accumulate(n.begin(), n.end(), 0); }

bool Basis::on_truncation_edge(std::size_t i) const {
  const Occupation& n = states_[i];
  const int sum = total(n);
  for (std::size_t mode = 0; mode < n.size(); ++mode) {
    if (n[mode] == cutoffs_[mode] && sum - n[mode] > 0) return true;
  }
  return false;
}

void require_same_basis(const BasisPtr& a, const BasisPtr& b) {
  if (a == b) return;
  if (!a || !b || !(*a == *b)) throw Error(ErrorCode::kBasisMismatch, "operands live on different bases");
}

// --- StateVector -----------------------------------------------------------

StateVector::StateVector(BasisPtr basis)
    : basis_(std::move(basis)),
      amplitudes_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_->dimension()))) {}

StateVector::StateVector(BasisPtr basis, Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != basis_->dimension()) {
    throw Error(ErrorCode::kBasisMismatch, "amplitude count differs from basis dimension");
  }
}

StateVector StateVector::basis_state(BasisPtr basis, const Occupation& n) {
  auto idx = basis->find(n);
  if (!idx) throw Error(ErrorCode::kCutoffTooSmall, "occupation tuple not in basis");
  StateVector v(std::move(basis));
  v.amplitudes_[static_cast<Eigen::Index>(*idx)] = 1.0;
  return v;
}

Complex StateVector::amplitude(const Occupation& n) const {
  auto idx = basis_->find(n);
  return idx ? amplitudes_[static_cast<Eigen::Index>(*idx)] : Complex{};
}

StateVector StateVector::normalized() const {
  const double nrm = amplitudes_.norm();
  if (nrm == 0.0) throw Error(ErrorCode::kInvalidParams, "cannot normalize the zero vector");
  return StateVector(basis_, amplitudes_ / nrm);
}

StateVector StateVector::project_onto(BasisPtr target, double drop_tolerance) const {
  StateVector out(target);
  for (std::size_t i = 0; i < basis_->dimension(); ++i) {
    const Complex amp = amplitudes_[static_cast<Eigen::Index>(i)];
    auto j = target->find((*basis_)[i]);
    if (j) {
      out.amplitudes_[static_cast<Eigen::Index>(*j)] = amp;
    } else if (std::abs(amp) > drop_tolerance) {
      throw Error(ErrorCode::kCutoffTooSmall, "target basis cannot hold the state");
    }
  }
  return out;
}

// --- OperatorMatrix --------------------------------------------------------

OperatorMatrix::OperatorMatrix(BasisPtr basis, SparseMatrix entries)
    : basis_(std::move(basis)), entries_(std::move(entries)) {
  const auto dim = static_cast<Eigen::Index>(basis_->dimension());
  if (entries_.rows() != dim || entries_.cols() != dim) {
    throw Error(ErrorCode::kBasisMismatch, "matrix shape differs from basis dimension");
  }
  entries_.makeCompressed();
}

OperatorMatrix OperatorMatrix::identity(BasisPtr basis) {
  const auto dim = static_cast<Eigen::Index>(basis->dimension());
  SparseMatrix id(dim, dim);
  id.setIdentity();
  return OperatorMatrix(std::move(basis), std::move(id));
}

OperatorMatrix OperatorMatrix::zero(BasisPtr basis) {
  const auto dim = static_cast<Eigen::Index>(basis->dimension());
  return OperatorMatrix(std::move(basis), SparseMatrix(dim, dim));
}

OperatorMatrix OperatorMatrix::adjoint() const { return OperatorMatrix(basis_, entries_.adjoint()); }

double OperatorMatrix::hermiticity_defect() const {
  SparseMatrix diff = entries_ - SparseMatrix(entries_.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& rhs) const {
  require_same_basis(basis_, rhs.basis_);
  return OperatorMatrix(basis_, entries_ + rhs.entries_);
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& rhs) const {
  require_same_basis(basis_, rhs.basis_);
  return OperatorMatrix(basis_, entries_ - rhs.entries_);
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& rhs) const {
  require_same_basis(basis_, rhs.basis_);
  return OperatorMatrix(basis_, SparseMatrix(entries_ * rhs.entries_));
}

OperatorMatrix OperatorMatrix::operator*(Complex scale) const {
  return OperatorMatrix(basis_, SparseMatrix(entries_ * scale));
}

OperatorMatrix commutator(const OperatorMatrix& x, const OperatorMatrix& y) { return x * y - y * x; }

OperatorMatrix build_operator(const BasisPtr& basis,
                              const std::function<void(const Occupation&, const EmitFn&)>& rule) {
  const auto dim = static_cast<Eigen::Index>(basis->dimension());
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t col = 0; col < basis->dimension(); ++col) {
    rule((*basis)[col], [&](const Occupation& target, Complex amp) {
      if (amp == Complex{}) return;
      if (auto row = basis->find(target)) {
        triplets.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col), amp);
      }
    });
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(basis, std::move(m));
}

OperatorMatrix ladder(const BasisPtr& basis, std::size_t mode, LadderKind kind) {
  if (mode >= basis->mode_count()) throw Error(ErrorCode::kInvalidParams, "mode index out of range");
  return build_operator(basis, [&](const Occupation& n, const EmitFn& emit) {
    Occupation target = n;
    if (kind == LadderKind::kRaise) {
      target[mode] += 1;
      emit(target, std::sqrt(static_cast<double>(n[mode] + 1)));
    } else if (n[mode] > 0) {
      target[mode] -= 1;
      emit(target, std::sqrt(static_cast<double>(n[mode])));
    }
  });
}

OperatorMatrix number_operator(const BasisPtr& basis, std::size_t mode) {
  if (mode >= basis->mode_count()) throw Error(ErrorCode::kInvalidParams, "mode index out of range");
  return build_operator(basis, [&](const Occupation& n, const EmitFn& emit) {
    emit(n, static_cast<double>(n[mode]));
  });
}

OperatorMatrix hop(const BasisPtr& basis, std::size_t from, std::size_t to) {
  if (from >= basis->mode_count() || to >= basis->mode_count() || from == to) {
    throw Error(ErrorCode::kInvalidParams, "hop needs two distinct valid modes");
  }
  return build_operator(basis, [&](const Occupation& n, const EmitFn& emit) {
    if (n[from] == 0) return;
    Occupation target = n;
    target[from] -= 1;
    target[to] += 1;
    emit(target, std::sqrt(static_cast<double>(n[from]) * static_cast<double>(n[to] + 1)));
  });
}

StateVector apply(const OperatorMatrix& op, const StateVector& v) {
  require_same_basis(op.basis_ptr(), v.basis_ptr());
  return StateVector(op.basis_ptr(), op.matrix() * v.amplitudes());
}

Complex inner(const StateVector& u, const StateVector& v) {
  require_same_basis(u.basis_ptr(), v.basis_ptr());
  return u.amplitudes().dot(v.amplitudes());  // Eigen's dot conjugates the left operand
}

double norm(const StateVector& v) { return v.amplitudes().norm(); }

// --- eigensolver -----------------------------------------------------------

HermitianSpectrum hermitian_eigen(const Eigen::MatrixXcd& m, double hermiticity_tolerance) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kNotHermitian, "matrix is not square");
  const double defect = m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect > hermiticity_tolerance) {
    std::ostringstream msg;
    msg << "max |M - M^dagger| = " << defect << " exceeds " << hermiticity_tolerance;
    throw Error(ErrorCode::kNotHermitian, msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<Eigenpair> eigendecompose(const OperatorMatrix& op, double hermiticity_tolerance) {
  HermitianSpectrum spectrum = hermitian_eigen(op.dense(), hermiticity_tolerance);
  std::vector<Eigenpair> pairs;
  pairs.reserve(op.dimension());
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    pairs.push_back({spectrum.values[i], StateVector(op.basis_ptr(), spectrum.vectors.col(i))});
  }
  return pairs;
}

std::vector<Eigenpair> drop_truncation_artifacts(std::vector<Eigenpair> pairs, double weight_tolerance) {
  std::erase_if(pairs, [&](const Eigenpair& p) {
    const Basis& basis = p.vector.basis();
    double edge_weight = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
      if (basis.on_truncation_edge(i)) edge_weight += std::norm(p.vector[i]);
    }
    return edge_weight > weight_tolerance;
  });
  return pairs;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

Eigen::MatrixXcd restrict_to(const OperatorMatrix& op, const std::function<bool(const Occupation&)>& keep) {
  std::vector<Eigen::Index> selected;
  for (std::size_t i = 0; i < op.dimension(); ++i) {
    if (keep(op.basis()[i])) selected.push_back(static_cast<Eigen::Index>(i));
  }
  const Eigen::MatrixXcd full = op.dense();
  const auto k = static_cast<Eigen::Index>(selected.size());
  Eigen::MatrixXcd out(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = full(selected[r], selected[c]);
  }
  return out;
}

}  // namespace eitsim
