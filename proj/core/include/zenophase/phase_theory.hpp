#pragma once

// Closed-form phase bookkeeping for the circular trajectory traced by |down>
// under H = omega n.sigma/2 + eps/2, n = (sin theta, 0, cos theta).
//
// Frequencies in this header are in Hz; one loop lasts T = 1 / omega_hz.

#include "zenophase/quantum.hpp"

#include <cstdint>

namespace zenophase {

/// Experimental knobs: microwave detuning and resonant Rabi frequency (Hz).
struct DriveParams {
  double delta_hz = 0.0;
  double rabi_hz = 0.0;
};

/// Generalized Rabi frequency, polar angle of the drive axis, energy offset.
struct PolarParams {
  double omega_hz = 0.0;
  double theta = 0.0;
  double epsilon_hz = 0.0;

  /// Throws DomainError unless omega > 0 and 0 <= theta <= pi.
  void validate() const;
  Vec3 axis() const;
  double period_s() const { return 1.0 / omega_hz; }
  double omega_rad() const { return angular(omega_hz); }
  double epsilon_rad() const { return angular(epsilon_hz); }
  /// eps / omega
  double offset_ratio() const { return epsilon_hz / omega_hz; }
  HermitianOperator hamiltonian() const;
};

PolarParams from_detuning(const DriveParams& d, double epsilon_hz = 0.0);

/// A phase that may exceed one turn (multi-loop), with its wrapped value.
struct Phase {
  double unwrapped = 0.0;
  double wrapped = 0.0;
  /// Number of 2 pi turns removed: unwrapped = wrapped + 2 pi * wraps.
  std::int64_t wraps = 0;
  static Phase of(double unwrapped);
};

/// Total phase of one loop, -pi (1 + eps/omega), wrapped.
double total_phase(const PolarParams& p);
/// pi (cos theta - eps/omega), unwrapped.
double dynamical_phase(const PolarParams& p);
/// -integral of <psi(t)|H|psi(t)> over one period by composite Simpson
/// quadrature on the propagated state.
double dynamical_phase_numeric(const PolarParams& p, int steps);
/// loops * pi (1 - cos theta).
Phase aa_phase(double theta, int loops);
/// N arg(cos(pi/N) - i cos(theta) sin(pi/N)) + pi eps/omega, wrapped.
double zeno_phase_exact(std::int64_t n, const PolarParams& p);
/// -dynamical_phase(p)
double zeno_phase_limit(const PolarParams& p);
/// (1 - sin^2 theta sin^2(pi/N))^N
double zeno_survival(std::int64_t n, double theta);

/// The four phases of a closed (possibly repeated) circular loop.
struct PhaseBudget {
  Phase phi_total;
  Phase phi_dyn;
  Phase phi_geom;
  Phase phi_zeno;  ///< N -> infinity limit
  int loop_count = 1;
  double solid_angle = 0.0;  ///< per loop, sr

  /// (total - dyn - geom) folded into (-pi, pi].
  double closure_defect() const;
};

PhaseBudget phase_budget(const PolarParams& p, int loops = 1);

}  // namespace zenophase
