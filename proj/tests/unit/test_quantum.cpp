#include "support/oracles.hpp"
#include "zenophase/errors.hpp"
#include "zenophase/quantum.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace zenophase;

namespace {

CMatrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST(StateVector, RejectsBadShapes) {
  CVector v(2);
  v << 1.0, 0.0;
  EXPECT_THROW(StateVector(v, {"a"}), DomainError);
  CVector big(2);
  big << 1.0, 1.0;
  EXPECT_THROW(StateVector(big, {"a", "b"}), DomainError);
  CVector one(1);
  one << 1.0;
  EXPECT_THROW(StateVector(one, {"a"}), DomainError);
}

TEST(StateVector, QubitBasis) {
  EXPECT_EQ(qubit_down().dim(), 2u);
  EXPECT_DOUBLE_EQ(qubit_down().norm_squared(), 1.0);
  EXPECT_EQ(overlap(qubit_down(), qubit_up()), cplx(0.0));
}

TEST(Operators, ValidateInvariants) {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(HermitianOperator{m}, DomainError);
  EXPECT_THROW(UnitaryOperator{m}, DomainError);
  EXPECT_THROW(Projector{m}, DomainError);
  EXPECT_NO_THROW(Projector::onto(qubit_down()));
}

TEST(Su2Propagator, IdentityAtZeroTime) {
  const auto u = su2_propagator(Vec3(0, 0, 1), 3.0, 0.0, 0.0);
  EXPECT_LT(max_abs(u.matrix() - CMatrix::Identity(2, 2)), 1e-15);
}

TEST(Su2Propagator, FullPeriodIsGlobalPhase) {
  const double omega = angular(43.453e3);
  for (double ratio : {-1.0, -0.5, 0.0, 0.3, 1.0}) {
    const Vec3 n(std::sin(0.7), 0.0, std::cos(0.7));
    const auto u = su2_propagator(n, omega, ratio * omega, kTwoPi / omega);
    const cplx expected = std::exp(cplx(0.0, -kPi * (1.0 + ratio)));
    EXPECT_LT(max_abs(u.matrix() - expected * CMatrix::Identity(2, 2)), 1e-12) << ratio;
  }
}

TEST(Su2Propagator, HalfPeriodAboutXIsMinusISigmaX) {
  const double omega = 2.0;
  const auto u = su2_propagator(Vec3(1, 0, 0), omega, 0.0, kPi / omega);
  EXPECT_LT(max_abs(u.matrix() - cplx(0.0, -1.0) * pauli::x()), 1e-12);
  const CMatrix h = su2_hamiltonian(Vec3(1, 0, 0), omega, 0.0).matrix();
  EXPECT_LT(max_abs(u.matrix() - oracle::expm_series(h, kPi / omega)), 1e-12);
}

TEST(Su2Propagator, MatchesSeriesOracleOnRandomAxes) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    Vec3 n(u(rng), u(rng), u(rng));
    n.normalize();
    const double omega = 3.0 + u(rng);
    const double eps = 2.0 * u(rng);
    const double t = 1.5 + u(rng);
    const CMatrix h = su2_hamiltonian(n, omega, eps).matrix();
    EXPECT_LT(max_abs(su2_propagator(n, omega, eps, t).matrix() - oracle::expm_series(h, t)), 1e-12);
  }
}

TEST(Su2Propagator, RejectsNonUnitAxis) {
  EXPECT_THROW(su2_propagator(Vec3(1, 1, 0), 1.0, 0.0, 1.0), DomainError);
}

TEST(ExpmHermitian, ZeroGeneratorIsIdentity) {
  const auto u = expm_hermitian(HermitianOperator(CMatrix::Zero(3, 3)), 5.0);
  EXPECT_LT(max_abs(u.matrix() - CMatrix::Identity(3, 3)), 1e-15);
}

TEST(ExpmHermitian, SpinHalfTwoPiRotation) {
  const double omega = 1.7;
  const auto u = expm_hermitian(HermitianOperator(0.5 * omega * pauli::z()), kTwoPi / omega);
  EXPECT_LT(max_abs(u.matrix() + CMatrix::Identity(2, 2)), 1e-12);
}

TEST(ExpmHermitian, RandomDim4MatchesSeries) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 10; ++k) {
    const CMatrix h = random_hermitian(4, rng);
    const auto u = expm_hermitian(HermitianOperator(h), 0.37);
    EXPECT_LT(max_abs(u.matrix() - oracle::expm_series(h, 0.37)), 1e-10);
  }
}

TEST(ExpmHermitian, DiagonalFastPathIsExact) {
  CMatrix h = CMatrix::Zero(4, 4);
  h.diagonal() << 1.0, -2.0, 0.5, 3.0;
  const auto u = expm_hermitian(HermitianOperator(h), 0.9);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(u.matrix()(i, i), std::exp(cplx(0.0, -0.9 * h(i, i).real())));
  }
}

TEST(EvolutionOperator, LossyGeneratorMatchesSeries) {
  CMatrix g = su2_hamiltonian(Vec3(1, 0, 0), 2.0, 0.0).matrix();
  g(1, 1) -= cplx(0.0, 1.5);
  const CMatrix e = evolution_operator(g, 0.8);
  EXPECT_LT(max_abs(e - oracle::expm_series(g, 0.8)), 1e-10);
}

TEST(Apply, IdentityAndProjection) {
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const StateVector plus(v, qubit_labels());
  const auto same = apply(UnitaryOperator(CMatrix::Identity(2, 2)), plus);
  EXPECT_LT((same.amps() - plus.amps()).norm(), 1e-15);
  const auto p = apply(Projector::onto(qubit_down()), plus);
  EXPECT_NEAR(p[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p.norm_squared(), 0.5, 1e-15);
}

TEST(Apply, QuarterRotationGivesEqualWeights) {
  const double omega = 5.0;
  const auto u = su2_propagator(Vec3(1, 0, 0), omega, 0.0, kPi / (2.0 * omega));
  const auto psi = apply(u, qubit_down());
  EXPECT_NEAR(std::norm(psi[0]), 0.5, 1e-12);
  EXPECT_NEAR(std::norm(psi[1]), 0.5, 1e-12);
  const CVector ref =
      oracle::expm_series(su2_hamiltonian(Vec3(1, 0, 0), omega, 0.0).matrix(), kPi / (2.0 * omega)) *
      qubit_down().amps();
  EXPECT_LT((psi.amps() - ref).norm(), 1e-12);
}

TEST(Apply, DimensionMismatchThrows) {
  EXPECT_THROW(apply(UnitaryOperator(CMatrix::Identity(3, 3)), qubit_down()), DomainError);
}

TEST(Overlap, NormalizedSelfOverlapIsOne) {
  CVector v(2);
  v << cplx(0.6, 0.0), cplx(0.0, 0.8);
  const StateVector psi(v, qubit_labels());
  EXPECT_NEAR(std::abs(overlap(psi, psi) - 1.0), 0.0, 1e-15);
}

// The per-step Zeno factor <down|U^dagger(dt)|down> with the conjugate-linear
// first slot.
TEST(Overlap, ZenoStepFactor) {
  const double theta = 1.1937;
  const double omega = angular(43.453e3);
  const Vec3 n(std::sin(theta), 0.0, std::cos(theta));
  for (int N : {3, 10, 100}) {
    const double dt = kTwoPi / (N * omega);
    const auto step = apply(su2_propagator(n, omega, 0.0, dt), qubit_down());
    const cplx expected(std::cos(kPi / N), -std::cos(theta) * std::sin(kPi / N));
    EXPECT_LT(std::abs(overlap(step, qubit_down()) - expected), 1e-12);
    EXPECT_LT(std::abs(overlap(qubit_down(), step) - std::conj(expected)), 1e-12);
  }
}

TEST(WrapPhase, RangeIsHalfOpen) {
  EXPECT_DOUBLE_EQ(wrap_phase(kPi), kPi);
  EXPECT_NEAR(wrap_phase(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_phase(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_phase(0.1 + kTwoPi), 0.1, 1e-12);
}
