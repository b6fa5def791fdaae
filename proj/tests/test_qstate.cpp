#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chargeq/qstate.hpp"
#include "test_helpers.hpp"

using namespace chargeq;
namespace ct = chargeq::testing;

namespace {

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(m, Eigen::EigenvaluesOnly);
  return s.eigenvalues();
}

}  // namespace

TEST_CASE("hermitian_eigensystem basics") {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  auto s = hermitian_eigensystem(id);
  CHECK(std::abs(s.eigenvalues(0) - 1.0) < 1e-14);
  CHECK(std::abs(s.eigenvalues(1) - 1.0) < 1e-14);

  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  s = hermitian_eigensystem(d);
  CHECK(s.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(s.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0));

  Eigen::Matrix2cd pauli_x;
  pauli_x << 0.0, 1.0, 1.0, 0.0;
  s = hermitian_eigensystem(pauli_x);
  CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(s.eigenvalues(1) == doctest::Approx(-1.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(s.eigenvectors(0, 0)) - inv_sqrt2) < 1e-12);
  CHECK(std::abs(std::abs(s.eigenvectors(1, 0)) - inv_sqrt2) < 1e-12);

  Eigen::Matrix2cd bad;
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(hermitian_eigensystem(bad), std::invalid_argument);
}

TEST_CASE("hermitian_eigensystem reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix4cd g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = ct::random_gaussian(rng);
    const Eigen::Matrix4cd h = 0.5 * (g + g.adjoint()).eval();
    const auto s = hermitian_eigensystem(h);
    const Eigen::Matrix4cd rebuilt =
        s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i + 1 < 4; ++i) CHECK(s.eigenvalues(i) >= s.eigenvalues(i + 1));
  }
}

TEST_CASE("partial_trace_field on product and entangled states") {
  // |gg> (x) |5>
  Eigen::VectorXd w = Eigen::VectorXd::Zero(6);
  w(5) = 1.0;
  const auto psi = product_state({0, 0}, {1, 0}, {0, 0}, {1, 0}, w, 6);
  auto rho = partial_trace_field(psi, 5);
  CHECK(std::abs(rho.entries()(3, 3) - Complex(1, 0)) < 1e-14);
  CHECK(rho.entries().cwiseAbs().sum() == doctest::Approx(1.0));

  // (|ee,0> + |gg,2>)/sqrt(2): orthogonal field components kill coherence
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(12);
  amps(0 * 3 + 0) = 1.0 / std::sqrt(2.0);
  amps(3 * 3 + 2) = 1.0 / std::sqrt(2.0);
  rho = partial_trace_field(PureState(amps, 3), 2);
  CHECK(std::abs(rho.entries()(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(rho.entries()(3, 3) - 0.5) < 1e-14);
  CHECK(std::abs(rho.entries()(0, 3)) < 1e-14);

  // ((|ee> + |gg>)/sqrt(2)) (x) |0>: field factors out, state stays pure
  amps = Eigen::VectorXcd::Zero(8);
  amps(0 * 2 + 0) = 1.0 / std::sqrt(2.0);
  amps(3 * 2 + 0) = 1.0 / std::sqrt(2.0);
  rho = partial_trace_field(PureState(amps, 2), 1);
  CHECK(std::abs(rho.entries()(0, 3) - 0.5) < 1e-14);
  const auto eigs = sorted_eigenvalues(rho.entries());
  CHECK(std::abs(eigs(3) - 1.0) < 1e-12);  // rank one

  // declared cutoff must match the layout
  CHECK_THROWS_AS(partial_trace_field(PureState(amps, 2), 5), std::invalid_argument);
}

TEST_CASE("marginals") {
  const auto bell = ct::bell_state();
  auto ma = marginal(bell, Subsystem::a);
  CHECK((ma.entries() - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(22);
  const Eigen::Matrix2cd ra = ct::random_density2(rng);
  const Eigen::Matrix2cd rb = ct::random_density2(rng);
  const auto prod = ct::product_density(ra, rb);
  CHECK((marginal(prod, Subsystem::b).entries() - rb).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((marginal(prod, Subsystem::a).entries() - ra).cwiseAbs().maxCoeff() < 1e-14);

  const auto mix = ct::ee_gg_mixture();
  CHECK((marginal(mix, Subsystem::a).entries() - 0.5 * Eigen::Matrix2cd::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("partial transpose spectra") {
  std::mt19937_64 rng(33);
  const auto prod = ct::product_density(ct::random_density2(rng), ct::random_density2(rng));
  const auto pt = partial_transpose(prod, Subsystem::b);
  Eigen::VectorXd before = sorted_eigenvalues(prod.entries());
  Eigen::VectorXd after = sorted_eigenvalues(pt);
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);

  // Bell: {1/2, 1/2, 1/2, -1/2}
  const auto bell_pt = partial_transpose(ct::bell_state(), Subsystem::b);
  const auto bell_eigs = sorted_eigenvalues(bell_pt);
  CHECK(std::abs(bell_eigs(0) + 0.5) < 1e-12);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(bell_eigs(i) - 0.5) < 1e-12);

  const auto id_pt = partial_transpose(ct::maximally_mixed4(), Subsystem::a);
  CHECK((id_pt - 0.25 * Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial transpose is an involution and subsystem-symmetric") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = ct::random_density(rng);
    const auto pt_b = partial_transpose(rho, Subsystem::b);
    CHECK((partial_transpose(pt_b, Subsystem::b) - rho.entries()).cwiseAbs().maxCoeff() < 1e-15);

    const auto pt_a = partial_transpose(rho, Subsystem::a);
    const Eigen::VectorXd ea = sorted_eigenvalues(pt_a);
    const Eigen::VectorXd eb = sorted_eigenvalues(pt_b);
    CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(pt_b.trace().real() - 1.0) < 1e-12);
  }
}

TEST_CASE("von Neumann entropy") {
  Eigen::Matrix2cd half = 0.5 * Eigen::Matrix2cd::Identity();
  CHECK(von_neumann_entropy(DensityMatrix::from_matrix(half)) == doctest::Approx(1.0));

  Eigen::Matrix2cd pure = Eigen::Matrix2cd::Zero();
  pure(0, 0) = 1.0;
  CHECK(von_neumann_entropy(DensityMatrix::from_matrix(pure)) == doctest::Approx(0.0));

  Eigen::Matrix2cd skew = Eigen::Matrix2cd::Zero();
  skew(0, 0) = 0.9;
  skew(1, 1) = 0.1;
  // -sum p log2 p evaluated directly: 0.4689955935892812
  CHECK(std::abs(von_neumann_entropy(DensityMatrix::from_matrix(skew)) - 0.46899559358928) <
        1e-4);

  // natural-log base override
  CHECK(von_neumann_entropy(DensityMatrix::from_matrix(half), std::exp(1.0)) ==
        doctest::Approx(std::log(2.0)));
}

TEST_CASE("density matrix validation rejects corrupted inputs") {
  Eigen::Matrix2cd not_herm;
  not_herm << 1.0, Complex(0, 1e-3), Complex(0, 1e-3), 0.0;  // +i eps both sides
  CHECK_THROWS_AS(DensityMatrix::from_matrix(not_herm), std::invalid_argument);

  Eigen::Matrix2cd bad_trace = Eigen::Matrix2cd::Identity();
  CHECK_THROWS_AS(DensityMatrix::from_matrix(bad_trace), std::invalid_argument);

  Eigen::Matrix2cd negative = Eigen::Matrix2cd::Zero();
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(negative), std::invalid_argument);

  Eigen::VectorXcd unnormalized = Eigen::VectorXcd::Ones(4);
  CHECK_THROWS_AS(PureState(unnormalized, 1), std::invalid_argument);
}

TEST_CASE("entropy subadditivity on random two-qubit states") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rho = ct::random_density(rng);
    const double s_ab = von_neumann_entropy(rho);
    const double s_a = von_neumann_entropy(marginal(rho, Subsystem::a));
    const double s_b = von_neumann_entropy(marginal(rho, Subsystem::b));
    CHECK(s_ab <= s_a + s_b + 1e-9);
  }
}

TEST_CASE("marginal of a traced product state recovers the qubit state") {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXcd qa = ct::random_pure(rng, 2);
    const Eigen::VectorXcd qb = ct::random_pure(rng, 2);
    Eigen::VectorXd w(4);
    for (int i = 0; i < 4; ++i) w(i) = std::abs(ct::random_gaussian(rng)) + 0.1;
    const auto psi = product_state(qa(0), qa(1), qb(0), qb(1), w, 4);
    const auto rho_a = marginal(partial_trace_field(psi, 3), Subsystem::a);
    const Eigen::Matrix2cd expected = qa * qa.adjoint();
    CHECK((rho_a.entries() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("produced density matrices satisfy the global invariants") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = ct::random_density(rng);
    CHECK(rho.trace_error() < 1e-10);
    CHECK(rho.hermiticity_error() < 1e-12);
    CHECK(rho.min_eigenvalue() > -1e-10);
  }
}
