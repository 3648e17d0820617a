#pragma once

// Occupation-number bases, sparse operators and a dense Hermitian
// eigensolver for small multimode bosonic systems.

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "eitsim/errors.hpp"

namespace eitsim {

using Complex = std::complex<double>;
using Occupation = std::vector<int>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double kHermiticityTolerance = 1e-14;
inline constexpr double kTruncationWeightTolerance = 1e-8;

/// Ordered list of occupation tuples, optionally restricted to one
/// total-excitation sector. Tuples are stored in descending lexicographic
/// order, so for three modes (photon, A, C) the sector-1 basis reads
/// (1,0,0), (0,1,0), (0,0,1).
class Basis {
 public:
  using Filter = std::function<bool(const Occupation&)>;

  static std::shared_ptr<const Basis> enumerate(std::size_t mode_count, std::vector<int> cutoffs,
                                                std::optional<int> sector = std::nullopt,
                                                const Filter& keep = nullptr);

  std::size_t mode_count() const { return cutoffs_.size(); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::optional<int> sector() const { return sector_; }
  std::size_t dimension() const { return states_.size(); }

  const Occupation& operator[](std::size_t i) const { return states_[i]; }
  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  std::optional<std::size_t> find(const Occupation& n) const;
  static int total(const Occupation& n);

  // A state sits on the truncation edge when some mode is at its cutoff while
  // other modes still hold quanta that a number-conserving hop could move in.
  bool on_truncation_edge(std::size_t i) const;

  bool operator==(const Basis& other) const {
    return cutoffs_ == other.cutoffs_ && sector_ == other.sector_ && states_ == other.states_;
  }

 private:
  Basis() = default;

  std::vector<int> cutoffs_;
  std::optional<int> sector_;
  std::vector<Occupation> states_;
  std::map<Occupation, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const Basis>;

void require_same_basis(const BasisPtr& a, const BasisPtr& b);

class StateVector {
 public:
  explicit StateVector(BasisPtr basis);
  StateVector(BasisPtr basis, Eigen::VectorXcd amplitudes);

  static StateVector basis_state(BasisPtr basis, const Occupation& n);

  const Basis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() { return amplitudes_; }
  std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }

  Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }
  // Zero when the tuple is not part of the basis.
  Complex amplitude(const Occupation& n) const;

  StateVector normalized() const;
  // Re-expresses the state on another basis. Throws CutoffTooSmall when an
  // amplitude above `drop_tolerance` has no home in the target.
  StateVector project_onto(BasisPtr target, double drop_tolerance = 0.0) const;

 private:
  BasisPtr basis_;
  Eigen::VectorXcd amplitudes_;
};

class OperatorMatrix {
 public:
  OperatorMatrix(BasisPtr basis, SparseMatrix entries);

  static OperatorMatrix identity(BasisPtr basis);
  static OperatorMatrix zero(BasisPtr basis);

  const Basis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const SparseMatrix& matrix() const { return entries_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(entries_); }
  std::size_t dimension() const { return basis_->dimension(); }

  OperatorMatrix adjoint() const;
  double hermiticity_defect() const;

  OperatorMatrix operator+(const OperatorMatrix& rhs) const;
  OperatorMatrix operator-(const OperatorMatrix& rhs) const;
  OperatorMatrix operator*(const OperatorMatrix& rhs) const;
  OperatorMatrix operator*(Complex scale) const;

 private:
  BasisPtr basis_;
  SparseMatrix entries_;
};

inline OperatorMatrix operator*(Complex scale, const OperatorMatrix& op) { return op * scale; }

OperatorMatrix commutator(const OperatorMatrix& x, const OperatorMatrix& y);

/// Generic builder: `rule` is called once per source tuple and reports
/// (target tuple, amplitude) pairs through `emit`. Targets outside the basis
/// are dropped.
using EmitFn = std::function<void(const Occupation&, Complex)>;
OperatorMatrix build_operator(const BasisPtr& basis,
                              const std::function<void(const Occupation&, const EmitFn&)>& rule);

enum class LadderKind { kRaise, kLower };

OperatorMatrix ladder(const BasisPtr& basis, std::size_t mode, LadderKind kind);
OperatorMatrix number_operator(const BasisPtr& basis, std::size_t mode);
/// a_to^dagger a_from; stays inside a fixed excitation sector.
OperatorMatrix hop(const BasisPtr& basis, std::size_t from, std::size_t to);

StateVector apply(const OperatorMatrix& op, const StateVector& v);
Complex inner(const StateVector& u, const StateVector& v);
double norm(const StateVector& v);

struct HermitianSpectrum {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns, unit norm
};

HermitianSpectrum hermitian_eigen(const Eigen::MatrixXcd& m,
                                  double hermiticity_tolerance = kHermiticityTolerance);

struct Eigenpair {
  double value;
  StateVector vector;
};

std::vector<Eigenpair> eigendecompose(const OperatorMatrix& op,
                                      double hermiticity_tolerance = kHermiticityTolerance);

std::vector<Eigenpair> drop_truncation_artifacts(std::vector<Eigenpair> pairs,
                                                 double weight_tolerance = kTruncationWeightTolerance);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

/// Restriction of `op` to the basis states selected by `keep` (rows and columns).
Eigen::MatrixXcd restrict_to(const OperatorMatrix& op, const std::function<bool(const Occupation&)>& keep);

}  // namespace eitsim
