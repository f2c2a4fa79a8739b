#pragma once

// 87Rb layer: Breit-Rabi splittings, the four-level rotating-frame
// Hamiltonians of the Ramsey sequence, RF pulses, Zeno light pulses and
// Stern-Gerlach readout.
//
// Basis order: |1,-1>, |1,0> = |down>, |1,+1>, |2,0> = |up>.

#include "zenophase/phase_theory.hpp"
#include "zenophase/quantum.hpp"
#include "zenophase/zeno_engine.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace zenophase {

namespace level {
inline constexpr std::size_t kMinus = 0;
inline constexpr std::size_t kDown = 1;
inline constexpr std::size_t kPlus = 2;
inline constexpr std::size_t kUp = 3;
inline constexpr std::size_t kCount = 4;
}  // namespace level

std::vector<std::string> atom_labels();
StateVector atom_down();

struct MagneticEnvironment {
  double b_gauss = 6.179;
  double g_j = 2.002331;
  double g_i = -0.0009951;
  double mu_b_mhz_per_gauss = 1.3996245;
  double nu_hfs_mhz = 6834.682611;

  void validate() const;
  /// (g_J - g_I) mu_B B / nu_hfs
  double x() const;
};

enum class BreitRabiMode { kCorrected, kLiteral };

/// Delta_+- = nu_{+-1} - nu_0 in MHz.
struct ZeemanSplittings {
  double plus_mhz = 0.0;
  double minus_mhz = 0.0;
};

/// Corrected: -+ g_I mu_B B - (nu/2)[sqrt(1 +- x + x^2) - sqrt(1 + x^2)].
/// Literal drops the sqrt(1 + x^2) term.
ZeemanSplittings zeeman_splittings(const MagneticEnvironment& env,
                                   BreitRabiMode mode = BreitRabiMode::kCorrected);

/// Literal minus corrected (identical for both transitions), MHz.
double literal_mode_offset_mhz(const MagneticEnvironment& env);

/// |1,0> -> |2,0> frequency nu sqrt(1 + x^2), MHz.
double clock_frequency(const MagneticEnvironment& env);

enum class RFAxis { kX, kY };

struct RFPulseSpec {
  enum class Kind { kIdeal, kFinite };
  Kind kind = Kind::kIdeal;
  double duration_s = 6.245e-6;
  /// Rotation rate of the finite pulse: angle = 2 pi rabi duration.
  double rabi_hz = 1.0 / (8.0 * 6.245e-6);
  RFAxis axis = RFAxis::kY;
  double phase_rad = 0.0;

  void validate() const;
  double rotation_angle() const;
};

/// Spin-1 rotation on the F=1 block, identity on |up>. The ideal pulse
/// rotates by pi/4, splitting |down> into populations 1/4, 1/2, 1/4.
UnitaryOperator rf_pulse_unitary(const RFPulseSpec& spec);

enum class CaseId { kReference = 1, kReferenceProjected = 2, kFree = 3, kZeno = 4 };
int case_number(CaseId c);
CaseId case_from_number(int n);
bool case_coupled(CaseId c);
bool case_measured(CaseId c);

/// Rotating-frame detunings of |1,-+1> relative to |1,0>:
/// eta_+ = Delta_+ + nu_rf and eta_- = Delta_- - nu_rf, both in Hz.
struct FrameDetunings {
  double minus_hz = 0.0;
  double plus_hz = 0.0;
};
FrameDetunings frame_detunings(const MagneticEnvironment& env, double nu_rf_mhz,
                               BreitRabiMode mode = BreitRabiMode::kCorrected);

/// Four-level delay Hamiltonian (rad/s): eta on |1,-+1>, and on
/// {|down>, |up>} the block [[(eps - delta)/2, Omega/2], [Omega/2, (eps + delta)/2]]
/// with Omega = 0 for cases 1 and 2.
HermitianOperator delay_hamiltonian(CaseId c, const DriveParams& drive, double epsilon_hz,
                                    const FrameDetunings& eta);

struct ZenoPulseSpec {
  PulseModel model = PulseModel::kIdeal;
  double pulse_duration_s = 1.5e-6;
  double gamma_per_s = kTwoPi * 6e6;
};

/// Ideal: zero the |up> amplitude. Decay: damp it by exp(-Gamma t / 2).
/// F=1 amplitudes are untouched.
StateVector zeno_pulse_channel(const ZenoPulseSpec& spec, const StateVector& psi);

struct NoiseModel {
  double sigma_p = 0.0;
  std::int64_t atom_number = 0;
  std::uint64_t seed = 0;

  void validate() const;
  bool enabled() const { return sigma_p > 0.0 || atom_number > 0; }
};

/// P(-1), P(0), P(+1), P(F=2)
using Populations = std::array<double, 4>;

/// Populations renormalized over the surviving atoms, then shot noise
/// (multinomial over atom_number) and Gaussian noise of sigma_p, clipped to
/// [0, 1] and renormalized.
Populations stern_gerlach_readout(const StateVector& psi, const NoiseModel& noise,
                                  std::mt19937_64& rng);
Populations stern_gerlach_readout(const StateVector& psi);

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
/// Order-sensitive mix of a master seed with stream coordinates.
std::uint64_t mix_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords);

}  // namespace zenophase
