#include "zenophase/phase_theory.hpp"

#include "zenophase/errors.hpp"

#include <cmath>
#include <string>

namespace zenophase {

void PolarParams::validate() const {
  if (!(omega_hz > 0.0) || !std::isfinite(omega_hz)) {
    throw DomainError("PolarParams: omega must be positive");
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("PolarParams: theta outside [0, pi]");
  }
  if (!std::isfinite(epsilon_hz)) throw DomainError("PolarParams: epsilon not finite");
}

Vec3 PolarParams::axis() const { return {std::sin(theta), 0.0, std::cos(theta)}; }

HermitianOperator PolarParams::hamiltonian() const {
  validate();
  return su2_hamiltonian(axis(), omega_rad(), epsilon_rad());
}

PolarParams from_detuning(const DriveParams& d, double epsilon_hz) {
  if (d.rabi_hz < 0.0) throw DomainError("from_detuning: Rabi frequency must be non-negative");
  if (d.delta_hz == 0.0 && d.rabi_hz == 0.0) {
    throw DomainError("from_detuning: zero drive has no axis");
  }
  PolarParams p;
  p.omega_hz = std::hypot(d.delta_hz, d.rabi_hz);
  p.theta = std::atan2(d.rabi_hz, d.delta_hz);
  p.epsilon_hz = epsilon_hz;
  return p;
}

Phase Phase::of(double unwrapped) {
  Phase ph;
  ph.unwrapped = unwrapped;
  ph.wrapped = wrap_phase(unwrapped);
  ph.wraps = std::llround((unwrapped - ph.wrapped) / kTwoPi);
  return ph;
}

double total_phase(const PolarParams& p) {
  p.validate();
  return wrap_phase(-kPi * (1.0 + p.offset_ratio()));
}

double dynamical_phase(const PolarParams& p) {
  p.validate();
  return kPi * (std::cos(p.theta) - p.offset_ratio());
}

double dynamical_phase_numeric(const PolarParams& p, int steps) {
  p.validate();
  if (steps < 100) throw DomainError("dynamical_phase_numeric: need at least 100 steps");
  if (steps % 2 != 0) ++steps;  // Simpson needs an even panel count
  const CMatrix h = p.hamiltonian().matrix();
  const Vec3 n = p.axis();
  const double period = p.period_s();
  const double dt = period / steps;
  const StateVector psi0 = qubit_down();
  double sum = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    const StateVector psi = zenophase::apply(su2_propagator(n, p.omega_rad(), p.epsilon_rad(), t), psi0);
    const double energy = psi.amps().dot(h * psi.amps()).real();
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += w * energy;
  }
  return -sum * dt / 3.0;
}

Phase aa_phase(double theta, int loops) {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("aa_phase: theta outside [0, pi]");
  if (loops < 1) throw DomainError("aa_phase: loops must be >= 1");
  return Phase::of(loops * kPi * (1.0 - std::cos(theta)));
}

double zeno_phase_exact(std::int64_t n, const PolarParams& p) {
  p.validate();
  if (n < 1) throw DomainError("zeno_phase_exact: N must be >= 1");
  const double x = kPi / static_cast<double>(n);
  // Each factor satisfies |arg z| <= pi/N, so a single principal arg per
  // factor never crosses the branch cut.
  const cplx z(std::cos(x), -std::cos(p.theta) * std::sin(x));
  if (std::abs(z) < 1e-12) {
    throw ExtinguishedTrajectory("zeno_phase_exact: overlap vanishes for N=" +
                                 std::to_string(n) + "; phase undefined");
  }
  return wrap_phase(static_cast<double>(n) * std::arg(z) + kPi * p.offset_ratio());
}

double zeno_phase_limit(const PolarParams& p) { return -dynamical_phase(p); }

double zeno_survival(std::int64_t n, double theta) {
  if (n < 1) throw DomainError("zeno_survival: N must be >= 1");
  const double s = std::sin(theta) * std::sin(kPi / static_cast<double>(n));
  return std::pow(1.0 - s * s, static_cast<double>(n));
}

double PhaseBudget::closure_defect() const {
  return wrap_phase(phi_total.unwrapped - phi_dyn.unwrapped - phi_geom.unwrapped);
}

PhaseBudget phase_budget(const PolarParams& p, int loops) {
  p.validate();
  if (loops < 1) throw DomainError("phase_budget: loops must be >= 1");
  PhaseBudget b;
  b.loop_count = loops;
  b.phi_total = Phase::of(-kPi * (1.0 + p.offset_ratio()) * loops);
  b.phi_dyn = Phase::of(dynamical_phase(p) * loops);
  b.phi_geom = aa_phase(p.theta, loops);
  b.phi_zeno = Phase::of(-dynamical_phase(p) * loops);
  b.solid_angle = kTwoPi * (1.0 - std::cos(p.theta));
  return b;
}

}  // namespace zenophase
