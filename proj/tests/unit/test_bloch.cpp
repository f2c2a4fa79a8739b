#include "support/oracles.hpp"
#include "zenophase/bloch.hpp"
#include "zenophase/errors.hpp"
#include "zenophase/zeno_engine.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <tuple>

using namespace zenophase;

namespace {

std::vector<StateVector> circle_states(double theta, int n, double eps_ratio = 0.0) {
  const double omega = 1.0;
  std::vector<StateVector> out;
  for (int k = 0; k <= n; ++k) {
    out.emplace_back(oracle::circle_state(omega, theta, eps_ratio * omega, kTwoPi * k / n), qubit_labels());
  }
  return out;
}

double oracle_loop_phase(const std::vector<EvolutionSegment>& segs, int steps) {
  std::vector<oracle::CVector> states;
  oracle::CVector psi = qubit_down().amps();
  states.push_back(psi);
  for (const auto& s : segs) {
    const auto h = oracle::qubit_hamiltonian(s.hamiltonian.omega_rad(), s.hamiltonian.theta,
                                             s.hamiltonian.epsilon_rad());
    const oracle::CMatrix step = oracle::expm_series(h, s.duration_s / steps);
    for (int k = 0; k < steps; ++k) {
      psi = step * psi;
      states.push_back(psi);
    }
  }
  return oracle::bargmann(states);
}

}  // namespace

TEST(BlochVector, Conventions) {
  EXPECT_LT((bloch_vector(qubit_down()) - Vec3(0, 0, -1)).norm(), 1e-15);
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  EXPECT_LT((bloch_vector(StateVector(v, qubit_labels())) - Vec3(1, 0, 0)).norm(), 1e-15);
}

// Right-handed precession about x takes -z to +y after a quarter period.
TEST(BlochVector, QuarterPeriodOnEquatorDrive) {
  const PolarParams p{10e3, kPi / 2.0, 0.0};
  const auto psi = apply(su2_propagator(p.axis(), p.omega_rad(), 0.0, p.period_s() / 4.0), qubit_down());
  EXPECT_LT((bloch_vector(psi) - Vec3(0, 1, 0)).norm(), 1e-12);
}

TEST(BlochVector, RejectsOtherDimensions) {
  EXPECT_THROW(bloch_vector(StateVector::basis(0, {"a", "b", "c"})), DomainError);
}

TEST(SampleTrajectory, FullPeriodClosesHalfDoesNot) {
  const PolarParams p{43.453e3, 1.1937, 16e3};
  const auto full = sample_trajectory({{p, p.period_s()}}, 400, qubit_down());
  EXPECT_TRUE(full.closed);
  EXPECT_LT(full.closure_residual, 1e-9);
  EXPECT_EQ(full.samples.size(), 401u);
  const auto half = sample_trajectory({{p, p.period_s() / 2.0}}, 400, qubit_down());
  EXPECT_FALSE(half.closed);
  for (const auto& s : full.samples) EXPECT_NEAR(s.r.norm(), 1.0, 1e-12);
}

TEST(SampleTrajectory, SharedEndpointsStoredOnce) {
  const PolarParams p{10e3, 1.0, 0.0};
  const auto path = sample_trajectory({{p, 1e-5}, {p, 2e-5}}, 10, qubit_down());
  EXPECT_EQ(path.samples.size(), 21u);
  EXPECT_NEAR(path.samples.back().t_s, 3e-5, 1e-18);
}

TEST(Bargmann, GreatCircleAndConstant) {
  EXPECT_NEAR(oracle::angle_distance(bargmann_geometric_phase(circle_states(kPi / 2.0, 10000)), kPi), 0.0,
              1e-4);
  std::vector<StateVector> same(5, qubit_down());
  EXPECT_NEAR(bargmann_geometric_phase(same), 0.0, 1e-15);
}

TEST(Bargmann, TiltedCircleMatchesAaPhase) {
  EXPECT_NEAR(oracle::angle_distance(bargmann_geometric_phase(circle_states(1.1937, 10000)), 1.9848), 0.0,
              1e-3);
  // Global phases along the chain do not matter.
  EXPECT_NEAR(oracle::angle_distance(bargmann_geometric_phase(circle_states(1.1937, 10000, 0.7)), 1.9848),
              0.0, 1e-3);
}

TEST(Bargmann, AgreesWithTestOracle) {
  const auto states = circle_states(0.6, 2000);
  std::vector<oracle::CVector> raw;
  for (const auto& s : states) raw.push_back(s.amps());
  EXPECT_NEAR(bargmann_geometric_phase(states), oracle::bargmann(raw), 1e-12);
}

TEST(Bargmann, Rejections) {
  std::vector<StateVector> two(2, qubit_down());
  EXPECT_THROW(bargmann_geometric_phase(two), DomainError);
  std::vector<StateVector> open{qubit_down(), qubit_down(), qubit_up()};
  EXPECT_THROW(bargmann_geometric_phase(open), DomainError);
  std::vector<StateVector> flip{qubit_down(), qubit_up(), qubit_down()};
  EXPECT_THROW(bargmann_geometric_phase(flip), IllConditionedDiscretization);
}

TEST(ConeSolidAngle, ClosedForms) {
  EXPECT_EQ(cone_solid_angle(0.0), 0.0);
  EXPECT_NEAR(cone_solid_angle(kPi / 2.0), kTwoPi, 1e-15);
  EXPECT_NEAR(cone_solid_angle(1.1937), 3.9696, 2e-4);
}

TEST(CapLoop, CoincidentCirclesGiveCone) {
  const Vec3 a(std::sin(0.8), 0.0, std::cos(0.8));
  for (auto region : {CapRegion::kSmaller, CapRegion::kLarger}) {
    EXPECT_NEAR(cap_loop_solid_angle({a, a, 0.5, 0.5, region}), cone_solid_angle(0.5), 1e-12);
  }
}

TEST(CapLoop, LensAndUnionAddUp) {
  const Vec3 a(0, 0, 1);
  const Vec3 b(std::sin(0.6), 0, std::cos(0.6));
  const double lens = cap_loop_solid_angle({a, b, 0.5, 0.4, CapRegion::kSmaller});
  const double uni = cap_loop_solid_angle({a, b, 0.5, 0.4, CapRegion::kLarger});
  EXPECT_NEAR(lens + uni, cone_solid_angle(0.5) + cone_solid_angle(0.4), 1e-12);
  EXPECT_GT(lens, 0.0);
  EXPECT_LT(lens, cone_solid_angle(0.4));
  EXPECT_EQ(cap_circle_intersections({a, b, 0.5, 0.4, CapRegion::kSmaller}).size(), 2u);
}

// Monte Carlo area of the lens as an independent check of Gauss-Bonnet.
TEST(CapLoop, LensMatchesMonteCarlo) {
  const Vec3 a(0, 0, 1);
  const Vec3 b(std::sin(0.6), 0, std::cos(0.6));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const int n = 400000;
  int hits = 0;
  for (int k = 0; k < n; ++k) {
    Vec3 r(g(rng), g(rng), g(rng));
    r.normalize();
    if (r.dot(a) >= std::cos(0.5) && r.dot(b) >= std::cos(0.4)) ++hits;
  }
  const double mc = 4.0 * kPi * hits / n;
  const double sigma = 4.0 * kPi * std::sqrt(static_cast<double>(hits)) / n;
  EXPECT_NEAR(cap_loop_solid_angle({a, b, 0.5, 0.4, CapRegion::kSmaller}), mc, 4.0 * sigma);
}

TEST(CapLoop, DisjointAndParallelRejected) {
  const Vec3 a(0, 0, 1);
  EXPECT_THROW(cap_loop_solid_angle({a, Vec3(1, 0, 0), 0.2, 0.2, CapRegion::kSmaller}), DomainError);
  EXPECT_THROW(cap_loop_solid_angle({a, a, 0.2, 0.3, CapRegion::kSmaller}), DomainError);
}

TEST(CapLoop, SwitchedLoopsMatchBargmannOracle) {
  for (auto [d, r1, r2] : {std::tuple{24e3, 36.7e3, 26.4e3}, std::tuple{16e3, 36.7e3, 19.9e3}}) {
    const auto h1 = from_detuning({d, r1}, d);
    const auto h2 = from_detuning({d, r2}, d);
    const auto sched = find_closed_loop_schedule(h1, h2);
    const auto spec = cap_loop_from_schedule(h1, h2, sched);
    const double predicted = loop_phase_prediction(spec);
    EXPECT_NEAR(predicted, wrap_phase(0.5 * cap_loop_solid_angle(spec)), 1e-15);
    const double oracle_phase = oracle_loop_phase(sched.segments(h1, h2), 4000);
    EXPECT_NEAR(oracle::angle_distance(predicted, oracle_phase), 0.0, 1e-3);
    const double library =
        bargmann_geometric_phase(sample_states(sched.segments(h1, h2), 4000, qubit_down()));
    EXPECT_NEAR(oracle::angle_distance(predicted, library), 0.0, 1e-3);
  }
}

TEST(LoopPhasePrediction, Circles) {
  EXPECT_NEAR(loop_phase_prediction(kPi / 2.0, 1), kPi, 1e-15);
  EXPECT_NEAR(loop_phase_prediction(1.1937, 2), -2.3136, 2e-4);
}

TEST(WritePathCsv, Header) {
  const PolarParams p{10e3, 1.0, 0.0};
  std::ostringstream out;
  write_path_csv(out, sample_trajectory({{p, p.period_s()}}, 4, qubit_down()));
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "t_s,rx,ry,rz");
}
