#pragma once

// Bloch-sphere trajectories, analytic solid angles and the Bargmann-product
// geometric phase.
//
// With |down> -> (0, 0, -1), U(t) = exp(-i omega t n.sigma/2) rotates Bloch
// vectors right-handedly about n. The circle traced by U(t)|down> is the
// boundary of the cap {r . (-n) >= cos theta}, traversed with that cap on its
// right; its geometric phase is half the cap area.

#include "zenophase/quantum.hpp"

#include <iosfwd>
#include <vector>

namespace zenophase {

struct EvolutionSegment;
struct PolarParams;
struct LoopSchedule;

/// <sigma> / <psi|psi> for a two-level state.
Vec3 bloch_vector(const StateVector& psi);

struct BlochSample {
  Vec3 r;
  double t_s = 0.0;
};

struct BlochPath {
  std::vector<BlochSample> samples;
  bool closed = false;
  double closure_residual = 0.0;
};

/// Uniform sampling of each segment (steps_per_segment intervals, so
/// steps_per_segment + 1 points including both ends; shared endpoints between
/// segments are stored once).
BlochPath sample_trajectory(const std::vector<EvolutionSegment>& segments, int steps_per_segment,
                            const StateVector& initial);

/// States along the same sampling, for the Bargmann oracle.
std::vector<StateVector> sample_states(const std::vector<EvolutionSegment>& segments,
                                       int steps_per_segment, const StateVector& initial);

/// -arg prod_k <psi_k|psi_{k+1}> with the last state replaced by the first.
/// Needs at least 3 states and a last state on the ray of the first within
/// 1e-6.
double bargmann_geometric_phase(const std::vector<StateVector>& states);

/// 2 pi (1 - cos theta)
double cone_solid_angle(double theta);

enum class CapRegion { kLarger, kSmaller };

/// Two caps {r . axis_i >= cos(cone_angle_i)}. kSmaller is their
/// intersection, kLarger their union.
struct CapLoopSpec {
  Vec3 axis1;
  Vec3 axis2;
  double cone_angle1 = 0.0;
  double cone_angle2 = 0.0;
  CapRegion region = CapRegion::kSmaller;
};

/// Vertices where the two cap circles meet.
std::vector<Vec3> cap_circle_intersections(const CapLoopSpec& spec);

/// Area of the selected region by Gauss-Bonnet:
/// 2 pi - sum cos(Theta_i) dphi_i - sum alpha_j.
double cap_loop_solid_angle(const CapLoopSpec& spec);

/// Caps enclosed by a two-circle loop schedule, as seen from the traversal
/// (caps about -n_i through |down>, region picked from the arc midpoints).
CapLoopSpec cap_loop_from_schedule(const PolarParams& h1, const PolarParams& h2,
                                   const LoopSchedule& schedule);

/// Half the enclosed solid angle, wrapped. For the circle of |down> this is
/// loops * pi (1 - cos theta).
double loop_phase_prediction(double theta, int loops);
double loop_phase_prediction(const CapLoopSpec& spec);

/// CSV rows t_s,rx,ry,rz with a header.
void write_path_csv(std::ostream& out, const BlochPath& path);

}  // namespace zenophase
