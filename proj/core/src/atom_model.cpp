#include "zenophase/atom_model.hpp"

#include "zenophase/errors.hpp"

#include <algorithm>
#include <cmath>

namespace zenophase {

std::vector<std::string> atom_labels() { return {"1,-1", "1,0", "1,+1", "2,0"}; }

StateVector atom_down() { return StateVector::basis(level::kDown, atom_labels()); }

void MagneticEnvironment::validate() const {
  if (!(b_gauss >= 0.0) || !std::isfinite(b_gauss)) {
    throw DomainError("MagneticEnvironment: B must be >= 0");
  }
  if (!(nu_hfs_mhz > 0.0)) throw DomainError("MagneticEnvironment: nu_hfs must be positive");
  if (!std::isfinite(g_j) || !std::isfinite(g_i) || !std::isfinite(mu_b_mhz_per_gauss)) {
    throw DomainError("MagneticEnvironment: constants must be finite");
  }
}

double MagneticEnvironment::x() const {
  return (g_j - g_i) * mu_b_mhz_per_gauss * b_gauss / nu_hfs_mhz;
}

ZeemanSplittings zeeman_splittings(const MagneticEnvironment& env, BreitRabiMode mode) {
  env.validate();
  const double x = env.x();
  const double nuclear = env.g_i * env.mu_b_mhz_per_gauss * env.b_gauss;
  const double half = 0.5 * env.nu_hfs_mhz;
  const double center = mode == BreitRabiMode::kCorrected ? std::sqrt(1.0 + x * x) : 0.0;
  ZeemanSplittings z;
  z.plus_mhz = -nuclear - half * (std::sqrt(1.0 + x + x * x) - center);
  z.minus_mhz = nuclear - half * (std::sqrt(1.0 - x + x * x) - center);
  return z;
}

double literal_mode_offset_mhz(const MagneticEnvironment& env) {
  env.validate();
  const double x = env.x();
  return -0.5 * env.nu_hfs_mhz * std::sqrt(1.0 + x * x);
}

double clock_frequency(const MagneticEnvironment& env) {
  env.validate();
  const double x = env.x();
  return env.nu_hfs_mhz * std::sqrt(1.0 + x * x);
}

// ---------------------------------------------------------------------------

void RFPulseSpec::validate() const {
  if (kind == Kind::kFinite) {
    if (!(duration_s > 0.0)) throw DomainError("RFPulseSpec: finite pulse needs a positive duration");
    if (!(rabi_hz > 0.0)) throw DomainError("RFPulseSpec: finite pulse needs a positive Rabi rate");
  }
  if (!std::isfinite(phase_rad)) throw DomainError("RFPulseSpec: phase must be finite");
}

double RFPulseSpec::rotation_angle() const {
  return kind == Kind::kIdeal ? 0.25 * kPi : kTwoPi * rabi_hz * duration_s;
}

namespace {

// cos(a) J_x + sin(a) J_y on the F=1 block, zero on |up>.
CMatrix spin1_generator(double azimuth) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx up = r * std::exp(cplx(0.0, -azimuth));  // <m+1| n.J |m>
  CMatrix j = CMatrix::Zero(4, 4);
  j(1, 0) = up;
  j(2, 1) = up;
  j(0, 1) = std::conj(up);
  j(1, 2) = std::conj(up);
  return j;
}

}  // namespace

UnitaryOperator rf_pulse_unitary(const RFPulseSpec& spec) {
  spec.validate();
  const double azimuth = (spec.axis == RFAxis::kX ? 0.0 : 0.5 * kPi) + spec.phase_rad;
  const CMatrix j = spin1_generator(azimuth);
  const double angle = spec.rotation_angle();
  if (spec.kind == RFPulseSpec::Kind::kFinite) {
    return expm_hermitian(HermitianOperator(kTwoPi * spec.rabi_hz * j), spec.duration_s);
  }
  // Spin 1: exp(-i a n.J) = 1 - i sin(a) n.J - (1 - cos(a)) (n.J)^2.
  CMatrix u = CMatrix::Identity(4, 4) - cplx(0.0, std::sin(angle)) * j -
              (1.0 - std::cos(angle)) * (j * j);
  return UnitaryOperator(u);
}

int case_number(CaseId c) { return static_cast<int>(c); }

CaseId case_from_number(int n) {
  if (n < 1 || n > 4) throw DomainError("case must be 1, 2, 3 or 4");
  return static_cast<CaseId>(n);
}

bool case_coupled(CaseId c) { return c == CaseId::kFree || c == CaseId::kZeno; }

bool case_measured(CaseId c) { return c == CaseId::kReferenceProjected || c == CaseId::kZeno; }

FrameDetunings frame_detunings(const MagneticEnvironment& env, double nu_rf_mhz,
                               BreitRabiMode mode) {
  const ZeemanSplittings z = zeeman_splittings(env, mode);
  return {(z.minus_mhz - nu_rf_mhz) * 1e6, (z.plus_mhz + nu_rf_mhz) * 1e6};
}

HermitianOperator delay_hamiltonian(CaseId c, const DriveParams& drive, double epsilon_hz,
                                    const FrameDetunings& eta) {
  if (drive.rabi_hz < 0.0) throw DomainError("delay_hamiltonian: Rabi frequency must be >= 0");
  CMatrix h = CMatrix::Zero(4, 4);
  h(0, 0) = angular(eta.minus_hz);
  h(2, 2) = angular(eta.plus_hz);
  h(1, 1) = 0.5 * angular(epsilon_hz - drive.delta_hz);
  h(3, 3) = 0.5 * angular(epsilon_hz + drive.delta_hz);
  if (case_coupled(c)) {
    h(1, 3) = 0.5 * angular(drive.rabi_hz);
    h(3, 1) = h(1, 3);
  }
  return HermitianOperator(h);
}

StateVector zeno_pulse_channel(const ZenoPulseSpec& spec, const StateVector& psi) {
  if (psi.dim() != level::kCount) throw DomainError("zeno_pulse_channel: four-level state required");
  CVector a = psi.amps();
  const auto up = static_cast<Eigen::Index>(level::kUp);
  if (spec.model == PulseModel::kIdeal) {
    a(up) = 0.0;
  } else {
    if (!(spec.gamma_per_s > 0.0) || !(spec.pulse_duration_s >= 0.0)) {
      throw DomainError("zeno_pulse_channel: invalid decay pulse");
    }
    a(up) *= std::exp(-0.5 * spec.gamma_per_s * spec.pulse_duration_s);
  }
  return psi.with_amps(std::move(a));
}

// ---------------------------------------------------------------------------

void NoiseModel::validate() const {
  if (!(sigma_p >= 0.0) || !std::isfinite(sigma_p)) throw DomainError("NoiseModel: sigma_p must be >= 0");
  if (atom_number < 0) throw DomainError("NoiseModel: atom_number must be >= 0");
}

Populations stern_gerlach_readout(const StateVector& psi) {
  if (psi.dim() != level::kCount) throw DomainError("stern_gerlach_readout: four-level state required");
  const double n2 = psi.norm_squared();
  if (!(n2 > 0.0)) throw DomainError("stern_gerlach_readout: zero state");
  Populations p{};
  for (std::size_t i = 0; i < level::kCount; ++i) p[i] = std::norm(psi[i]) / n2;
  return p;
}

Populations stern_gerlach_readout(const StateVector& psi, const NoiseModel& noise,
                                  std::mt19937_64& rng) {
  noise.validate();
  const Populations exact = stern_gerlach_readout(psi);
  if (!noise.enabled()) return exact;
  Populations p = exact;
  if (noise.atom_number > 0) {
    std::int64_t remaining = noise.atom_number;
    double mass = 1.0;
    for (std::size_t i = 0; i < level::kCount; ++i) {
      std::int64_t k = remaining;
      if (i + 1 < level::kCount && remaining > 0) {
        const double q = mass > 0.0 ? std::clamp(exact[i] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::int64_t> draw(remaining, q);
        k = draw(rng);
      }
      p[i] = static_cast<double>(k) / static_cast<double>(noise.atom_number);
      remaining -= k;
      mass -= exact[i];
    }
  }
  if (noise.sigma_p > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise.sigma_p);
    for (double& v : p) v += gauss(rng);
  }
  double sum = 0.0;
  for (double& v : p) {
    v = std::clamp(v, 0.0, 1.0);
    sum += v;
  }
  if (!(sum > 0.0)) return exact;
  for (double& v : p) v /= sum;
  return p;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t c : coords) h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
  return h;
}

}  // namespace zenophase
