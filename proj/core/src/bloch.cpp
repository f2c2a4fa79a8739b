#include "zenophase/bloch.hpp"

#include "zenophase/errors.hpp"
#include "zenophase/zeno_engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace zenophase {

Vec3 bloch_vector(const StateVector& psi) {
  if (psi.dim() != 2) throw DomainError("bloch_vector: state must be two-level");
  const double n2 = psi.norm_squared();
  if (!(n2 > 0.0)) throw DomainError("bloch_vector: zero state");
  const CVector& a = psi.amps();
  const double x = a.dot(pauli::x() * a).real();
  const double y = a.dot(pauli::y() * a).real();
  const double z = a.dot(pauli::z() * a).real();
  return Vec3(x, y, z) / n2;
}

namespace {

template <typename Visit>
void walk_segments(const std::vector<EvolutionSegment>& segments, int steps,
                   const StateVector& initial, Visit&& visit) {
  if (steps < 2) throw DomainError("sample_trajectory: need at least 2 steps per segment");
  if (initial.dim() != 2) throw DomainError("sample_trajectory: state must be two-level");
  StateVector start = initial;
  double t0 = 0.0;
  visit(start, t0);
  for (const auto& seg : segments) {
    seg.hamiltonian.validate();
    const Vec3 n = seg.hamiltonian.axis();
    const double dt = seg.duration_s / steps;
    for (int k = 1; k <= steps; ++k) {
      const StateVector psi = zenophase::apply(
          su2_propagator(n, seg.hamiltonian.omega_rad(), seg.hamiltonian.epsilon_rad(), k * dt),
          start);
      visit(psi, t0 + k * dt);
      if (k == steps) start = psi;
    }
    t0 += seg.duration_s;
  }
}

}  // namespace

BlochPath sample_trajectory(const std::vector<EvolutionSegment>& segments, int steps_per_segment,
                            const StateVector& initial) {
  BlochPath path;
  walk_segments(segments, steps_per_segment, initial, [&](const StateVector& psi, double t) {
    path.samples.push_back({bloch_vector(psi), t});
  });
  path.closure_residual = (path.samples.front().r - path.samples.back().r).norm();
  path.closed = path.samples.size() > 1 && path.closure_residual < 1e-6;
  return path;
}

std::vector<StateVector> sample_states(const std::vector<EvolutionSegment>& segments,
                                       int steps_per_segment, const StateVector& initial) {
  std::vector<StateVector> out;
  walk_segments(segments, steps_per_segment, initial,
                [&](const StateVector& psi, double) { out.push_back(psi); });
  return out;
}

double bargmann_geometric_phase(const std::vector<StateVector>& states) {
  if (states.size() < 3) throw DomainError("bargmann_geometric_phase: need at least 3 states");
  const std::size_t n = states.size() - 1;
  const StateVector& first = states.front();
  for (const auto& s : states) {
    if (s.dim() != first.dim()) throw DomainError("bargmann_geometric_phase: dimension mismatch");
    if (!(s.norm_squared() > 0.0)) throw DomainError("bargmann_geometric_phase: zero state");
  }
  const double norm0 = std::sqrt(first.norm_squared());
  const double ray = std::abs(overlap(first, states.back())) /
                     (norm0 * std::sqrt(states.back().norm_squared()));
  if (1.0 - ray > 1e-6) {
    throw DomainError("bargmann_geometric_phase: path is not closed in ray space");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const StateVector& a = states[k];
    const StateVector& b = (k + 1 == n) ? first : states[k + 1];
    const cplx o = overlap(a, b);
    if (std::abs(o) / std::sqrt(a.norm_squared() * b.norm_squared()) < 1e-12) {
      throw IllConditionedDiscretization(
          "bargmann_geometric_phase: consecutive states are orthogonal at index " +
          std::to_string(k));
    }
    sum += std::arg(o);
  }
  return wrap_phase(-sum);
}

double cone_solid_angle(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("cone_solid_angle: theta outside [0, pi]");
  return kTwoPi * (1.0 - std::cos(theta));
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kTangency = 1e-9;

void check_spec(const CapLoopSpec& s) {
  if (std::abs(s.axis1.norm() - 1.0) > 1e-12 || std::abs(s.axis2.norm() - 1.0) > 1e-12) {
    throw DomainError("CapLoopSpec: axes must be unit vectors");
  }
  for (double a : {s.cone_angle1, s.cone_angle2}) {
    if (!(a > 0.0 && a < kPi)) throw DomainError("CapLoopSpec: cone angles must be in (0, pi)");
  }
}

bool coincident(const CapLoopSpec& s) {
  return (s.axis1 - s.axis2).norm() < 1e-12 && std::abs(s.cone_angle1 - s.cone_angle2) < 1e-12;
}

// Rodrigues rotation of v by angle a (right-handed) about unit axis k.
Vec3 rotate(const Vec3& v, const Vec3& k, double a) {
  return v * std::cos(a) + k.cross(v) * std::sin(a) + k * k.dot(v) * (1.0 - std::cos(a));
}

// Counter-clockwise (right-handed about axis) span from v to w.
double ccw_span(const Vec3& axis, const Vec3& v, const Vec3& w) {
  const Vec3 pv = v - axis * axis.dot(v);
  const Vec3 pw = w - axis * axis.dot(w);
  const double a = std::atan2(axis.dot(pv.cross(pw)), pv.dot(pw));
  return a < 0.0 ? a + kTwoPi : a;
}

bool inside(const Vec3& r, const Vec3& axis, double cone) {
  return r.dot(axis) >= std::cos(cone);
}

double turning(const Vec3& t_in, const Vec3& t_out, const Vec3& r) {
  return std::atan2(t_in.cross(t_out).dot(r), t_in.dot(t_out));
}

}  // namespace

std::vector<Vec3> cap_circle_intersections(const CapLoopSpec& spec) {
  check_spec(spec);
  const Vec3& a1 = spec.axis1;
  const Vec3& a2 = spec.axis2;
  const Vec3 c = a1.cross(a2);
  const double cn = c.norm();
  if (cn < 1e-12) throw DomainError("cap loop: circles do not meet in two points");
  const double g = a1.dot(a2);
  const double c1 = std::cos(spec.cone_angle1);
  const double c2 = std::cos(spec.cone_angle2);
  const double det = 1.0 - g * g;
  const double alpha = (c1 - g * c2) / det;
  const double beta = (c2 - g * c1) / det;
  const Vec3 base = alpha * a1 + beta * a2;
  const double rest = 1.0 - base.squaredNorm();
  if (rest < 0.0) throw DomainError("cap loop: circles do not intersect");
  const double h = std::sqrt(rest);
  if (h < kTangency) throw DomainError("cap loop: circles are tangent");
  const Vec3 u = c / cn;
  return {base + h * u, base - h * u};
}

double cap_loop_solid_angle(const CapLoopSpec& spec) {
  check_spec(spec);
  if (coincident(spec)) return cone_solid_angle(spec.cone_angle1);
  const auto v = cap_circle_intersections(spec);
  const Vec3& a1 = spec.axis1;
  const Vec3& a2 = spec.axis2;
  const bool want_inside = spec.region == CapRegion::kSmaller;

  // Arc of circle 1, counter-clockwise about a1, whose midpoint lies inside
  // cap 2 for the intersection and outside it for the union.
  Vec3 start = v[0];
  Vec3 end = v[1];
  double s1 = ccw_span(a1, start, end);
  if (inside(rotate(start, a1, 0.5 * s1), a2, spec.cone_angle2) != want_inside) {
    std::swap(start, end);
    s1 = kTwoPi - s1;
  }
  const double s2 = ccw_span(a2, end, start);
  if (inside(rotate(end, a2, 0.5 * s2), a1, spec.cone_angle1) != want_inside) {
    throw DomainError("cap loop: arcs do not bound the selected region");
  }
  const double alpha_end = turning(a1.cross(end), a2.cross(end), end);
  const double alpha_start = turning(a2.cross(start), a1.cross(start), start);
  return kTwoPi - std::cos(spec.cone_angle1) * s1 - std::cos(spec.cone_angle2) * s2 - alpha_end -
         alpha_start;
}

CapLoopSpec cap_loop_from_schedule(const PolarParams& h1, const PolarParams& h2,
                                   const LoopSchedule& schedule) {
  const StateVector down = qubit_down();
  const Vec3 r0 = bloch_vector(down);
  const StateVector p = zenophase::apply(su2_propagator(h1.axis(), h1.omega_rad(), 0.0, schedule.t1_s), down);
  const Vec3 rp = bloch_vector(p);
  CapLoopSpec spec;
  spec.axis1 = -h1.axis();
  spec.axis2 = -h2.axis();
  spec.cone_angle1 = std::acos(std::clamp(spec.axis1.dot(r0), -1.0, 1.0));
  spec.cone_angle2 = std::acos(std::clamp(spec.axis2.dot(rp), -1.0, 1.0));
  // The h1 arcs run symmetrically about |down>, so |down> is the midpoint of
  // the circle-1 part of the loop.
  spec.region = inside(r0, spec.axis2, spec.cone_angle2) ? CapRegion::kSmaller : CapRegion::kLarger;
  return spec;
}

double loop_phase_prediction(double theta, int loops) {
  if (loops < 1) throw DomainError("loop_phase_prediction: loops must be >= 1");
  return wrap_phase(0.5 * loops * cone_solid_angle(theta));
}

double loop_phase_prediction(const CapLoopSpec& spec) {
  return wrap_phase(0.5 * cap_loop_solid_angle(spec));
}

void write_path_csv(std::ostream& out, const BlochPath& path) {
  out << "t_s,rx,ry,rz\n";
  for (const auto& s : path.samples) {
    out << fmt::format("{},{},{},{}\n", s.t_s, s.r.x(), s.r.y(), s.r.z());
  }
  if (!out) throw std::runtime_error("write_path_csv: write failed");
}

}  // namespace zenophase
