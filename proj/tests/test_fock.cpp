#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "eitsim/fock.hpp"
#include "eitsim/model.hpp"

using namespace eitsim;

namespace {

// Brute-force count of tuples with 0 <= n_i <= cap_i summing to `total`.
std::size_t count_compositions(const std::vector<int>& caps, int total) {
  std::size_t count = 0;
  std::vector<int> n(caps.size(), 0);
  while (true) {
    int sum = 0;
    for (int x : n) sum += x;
    if (sum == total) ++count;
    std::size_t i = 0;
    while (i < n.size() && n[i] == caps[i]) n[i++] = 0;
    if (i == n.size()) break;
    ++n[i];
  }
  return count;
}

}  // namespace

TEST_CASE("enumerate_basis single-excitation sector") {
  auto b = Basis::enumerate(3, {1, 1, 1}, 1);
  REQUIRE(b->dimension() == 3);
  CHECK((*b)[0] == Occupation{1, 0, 0});
  CHECK((*b)[1] == Occupation{0, 1, 0});
  CHECK((*b)[2] == Occupation{0, 0, 1});
}

TEST_CASE("enumerate_basis counts match brute force") {
  CHECK(Basis::enumerate(3, {2, 2, 2}, 2)->dimension() == 6);
  for (int total = 0; total <= 6; ++total) {
    const std::vector<int> caps{2, 3, 1};
    const auto expected = count_compositions(caps, total);
    if (expected == 0) {
      CHECK_THROWS_AS(Basis::enumerate(3, caps, total), Error);
    } else {
      CHECK(Basis::enumerate(3, caps, total)->dimension() == expected);
    }
  }
}

TEST_CASE("enumerate_basis vacuum and empty sector") {
  auto vac = Basis::enumerate(1, {0});
  REQUIRE(vac->dimension() == 1);
  CHECK((*vac)[0] == Occupation{0});

  try {
    Basis::enumerate(2, {1, 1}, 3);
    FAIL("expected EmptySector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptySector);
  }
}

TEST_CASE("basis invariants and deterministic order") {
  auto a = Basis::enumerate(3, {3, 2, 4});
  auto b = Basis::enumerate(3, {3, 2, 4});
  CHECK(*a == *b);
  for (std::size_t i = 0; i < a->dimension(); ++i) {
    const auto& n = (*a)[i];
    CHECK(n[0] <= 3);
    CHECK(n[1] <= 2);
    CHECK(n[2] <= 4);
    if (i > 0) CHECK((*a)[i - 1] > n);  // strictly descending lexicographic
    CHECK(a->find(n) == i);
  }
}

TEST_CASE("ladder matrix elements") {
  auto b = Basis::enumerate(1, {2});
  const auto raise = ladder(b, 0, LadderKind::kRaise);
  const auto lower = ladder(b, 0, LadderKind::kLower);

  const StateVector vac = StateVector::basis_state(b, {0});
  const StateVector up = apply(raise, vac);
  CHECK(up.amplitude({1}).real() == doctest::Approx(1.0).epsilon(1e-15));

  const StateVector two = StateVector::basis_state(b, {2});
  CHECK(apply(lower, two).amplitude({1}).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // raise on the top state falls off the truncated space
  CHECK(norm(apply(raise, two)) == 0.0);
}

TEST_CASE("ladder commutator is identity away from the cutoff edge") {
  auto b = Basis::enumerate(2, {4, 3});
  for (std::size_t mode = 0; mode < 2; ++mode) {
    const auto raise = ladder(b, mode, LadderKind::kRaise);
    const auto lower = ladder(b, mode, LadderKind::kLower);
    const Eigen::MatrixXcd c = commutator(lower, raise).dense();
    for (std::size_t i = 0; i < b->dimension(); ++i) {
      const auto& n = (*b)[i];
      if (n[mode] + 1 > b->cutoffs()[mode]) continue;
      for (std::size_t j = 0; j < b->dimension(); ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        CHECK(std::abs(c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) - expected) < 1e-14);
      }
    }
  }
}

TEST_CASE("ladder connects only tuples one quantum apart in a single mode") {
  auto b = Basis::enumerate(3, {2, 2, 2});
  for (std::size_t mode = 0; mode < 3; ++mode) {
    const auto op = ladder(b, mode, LadderKind::kRaise);
    for (int k = 0; k < op.matrix().outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(op.matrix(), k); it; ++it) {
        const auto& from = (*b)[static_cast<std::size_t>(it.col())];
        const auto& to = (*b)[static_cast<std::size_t>(it.row())];
        int diff = 0;
        for (std::size_t q = 0; q < 3; ++q) diff += std::abs(to[q] - from[q]);
        CHECK(diff == 1);
        CHECK(to[mode] == from[mode] + 1);
      }
    }
  }
}

TEST_CASE("eigendecompose oracles") {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, std::sqrt(2.0), std::sqrt(2.0), 0.0;  // lambda^2 - lambda - 2 = 0
  const auto eig = hermitian_eigen(m);
  CHECK(eig.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eig.values[1] == doctest::Approx(2.0).epsilon(1e-14));

  auto b = Basis::enumerate(1, {2});
  const auto zero = eigendecompose(OperatorMatrix::zero(b));
  for (const auto& p : zero) CHECK(p.value == 0.0);

  SparseMatrix d(3, 3);
  d.insert(0, 0) = 3.0;
  d.insert(1, 1) = 1.0;
  d.insert(2, 2) = 2.0;
  const auto diag = eigendecompose(OperatorMatrix(b, d));
  CHECK(diag[0].value == doctest::Approx(1.0));
  CHECK(diag[1].value == doctest::Approx(2.0));
  CHECK(diag[2].value == doctest::Approx(3.0));
}

TEST_CASE("eigendecompose rejects non-Hermitian input") {
  auto b = Basis::enumerate(1, {1});
  SparseMatrix m(2, 2);
  m.insert(0, 1) = 1.0;
  try {
    eigendecompose(OperatorMatrix(b, m));
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotHermitian);
  }
}

TEST_CASE("eigendecompose residual property on random Hermitian matrices") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 25; ++trial) {
    auto b = Basis::enumerate(2, {3, 3});
    const auto dim = static_cast<Eigen::Index>(b->dimension());
    Eigen::MatrixXcd r(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) r(i, j) = Complex(gauss(rng), gauss(rng));
    const Eigen::MatrixXcd h = r + r.adjoint();
    SparseMatrix sparse = h.sparseView();
    const OperatorMatrix op(b, sparse);
    const double scale = spectral_norm(h);
    const auto pairs = eigendecompose(op);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i > 0) CHECK(pairs[i - 1].value <= pairs[i].value);
      const Eigen::VectorXcd res = h * pairs[i].vector.amplitudes() - pairs[i].value * pairs[i].vector.amplitudes();
      CHECK(res.norm() <= 1e-10 * scale);
    }
  }
}

TEST_CASE("apply / inner / norm contracts") {
  auto b = Basis::enumerate(2, {2, 2});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXcd x(static_cast<Eigen::Index>(b->dimension())), y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = Complex(u(rng), u(rng));
    y[i] = Complex(u(rng), u(rng));
  }
  const StateVector v(b, x), w(b, y);
  CHECK((apply(OperatorMatrix::identity(b), v).amplitudes() - x).norm() == 0.0);
  const Complex vv = inner(v, v);
  CHECK(vv.imag() == doctest::Approx(0.0));
  CHECK(vv.real() == doctest::Approx(norm(v) * norm(v)));
  // conjugate-linear in the first slot
  const Complex scale(0.3, -1.2);
  const StateVector sv(b, x * scale);
  CHECK(std::abs(inner(sv, w) - std::conj(scale) * inner(v, w)) < 1e-14);
  CHECK(v.normalized().amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));

  auto other = Basis::enumerate(2, {2, 1});
  try {
    inner(v, StateVector(other));
    FAIL("expected BasisMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBasisMismatch);
  }
}

TEST_CASE("model Hamiltonian is Hermitian and conserves excitation number") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> omega(0.0, 10.0), dc(-5.0, 5.0);
  auto full = model_basis(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto params = ModelParams::make(1.0, omega(rng), dc(rng));
    const auto h = build_hamiltonian(params, full);
    CHECK(h.hermiticity_defect() <= kHermiticityTolerance);
    const Eigen::MatrixXcd d = h.dense();
    for (Eigen::Index r = 0; r < d.rows(); ++r)
      for (Eigen::Index c = 0; c < d.cols(); ++c)
        if (Basis::total((*full)[static_cast<std::size_t>(r)]) != Basis::total((*full)[static_cast<std::size_t>(c)]))
          CHECK(d(r, c) == Complex{});
  }
}

TEST_CASE("truncation-edge filter drops only edge-supported eigenvectors") {
  auto full = model_basis(2);
  const auto pairs = eigendecompose(build_hamiltonian(ModelParams::make(1.0, 0.7, 0.4), full));
  const auto kept = drop_truncation_artifacts(pairs);
  CHECK(kept.size() < pairs.size());
  CHECK(!kept.empty());
  // sector bases with cutoff >= sector never truncate
  auto sector = model_basis(2, 2);
  const auto sp = eigendecompose(build_hamiltonian(ModelParams::make(1.0, 0.7, 0.4), sector));
  CHECK(drop_truncation_artifacts(sp).size() == sp.size());
}
