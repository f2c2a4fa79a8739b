#pragma once

// Ramsey fringe synthesis for the four cases and least-squares extraction of
// the magnetic field and the interferometer phase.

#include "zenophase/atom_model.hpp"
#include "zenophase/zeno_engine.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace zenophase {

/// One piece of the microwave drive window; the detuning is shared.
struct DriveSegment {
  double rabi_hz = 0.0;
  double duration_s = 0.0;
};

struct FringeConfig {
  CaseId case_id = CaseId::kReference;
  double delta_hz = 0.0;
  double epsilon_hz = 0.0;
  /// Drive window at the start of the delay.
  std::vector<DriveSegment> window;
  MagneticEnvironment env;
  BreitRabiMode mode = BreitRabiMode::kCorrected;
  double nu_rf_mhz = 4.323;
  RFPulseSpec rf;
  MeasurementSchedule schedule;
  /// Pulses in the measured cases (2 and 4).
  bool pulses_enabled = true;
  /// Keep pulsing after the drive window (measured cases only).
  bool zeno_during_idle = false;
  NoiseModel noise;
  int repetitions = 1;
  /// Sweep coordinate mixed into the per-sample seeds.
  std::uint64_t point_index = 0;

  double window_s() const;
  bool measured() const { return pulses_enabled && case_measured(case_id); }
};

/// Populations (P-1, P0, P+1) renormalized over F=1.
using Triple = std::array<double, 3>;

struct FringeDataset {
  int case_id = 1;
  std::vector<double> t_grid_s;
  int repetitions = 1;
  NoiseModel noise;
  /// Row-major: index t * repetitions + rep.
  std::vector<Triple> populations;

  const Triple& at(std::size_t t, int rep) const {
    return populations[t * static_cast<std::size_t>(repetitions) + static_cast<std::size_t>(rep)];
  }
  void validate() const;
};

/// RF pulse, case evolution over the delay (drive window first, idle after),
/// RF pulse, readout per repetition.
FringeDataset simulate_fringes(const FringeConfig& config, const std::vector<double>& t_grid_s);

/// State of the Ramsey sequence just after the drive window (before idle).
StateVector after_drive_window(const FringeConfig& config);

/// Idle-only interferometer with a phase phi applied to |down>; the model
/// behind both fits.
class FringeModel {
 public:
  FringeModel(MagneticEnvironment env, double nu_rf_mhz, RFPulseSpec rf,
              BreitRabiMode mode = BreitRabiMode::kCorrected, double reference_offset_hz = 0.0);

  /// Per-delay decomposition P_m(phi) = |u_m + v_m e^{i phi}|^2.
  struct Terms {
    std::array<cplx, 3> u;
    std::array<cplx, 3> v;
    Triple at(double phi) const;
  };

  std::vector<Terms> terms(double b_gauss, const std::vector<double>& t_grid_s) const;
  Triple populations(double b_gauss, double phi, double t_s) const;

 private:
  MagneticEnvironment env_;
  double nu_rf_mhz_;
  RFPulseSpec rf_;
  BreitRabiMode mode_;
  double reference_offset_hz_;
  CMatrix pulse_;
};

FringeModel model_for(const FringeConfig& config);

struct FitResult {
  enum class Parameter { kMagneticField, kPhase };
  Parameter parameter = Parameter::kPhase;
  double value = 0.0;
  double std_error = 0.0;
  double residual_rms = 0.0;
  std::int64_t n_points = 0;
};

/// Grid over b_prior +- 5 mG (0.05 mG steps), then Brent refinement.
FitResult fit_magnetic_field(const FringeDataset& ds, const FringeModel& model, double b_prior_gauss);

/// 721-point grid over [-pi, pi], then Brent refinement around the best node.
FitResult fit_phase(const FringeDataset& ds, const FringeModel& model, double b_gauss,
                    double probe_step_rad = 0.01);

/// sqrt(s^2 dphi^2 / sum_i (P_i(phi + dphi) - P_i(phi))^2) with s^2 the
/// residual variance SSR / (n - 1).
double fit_phase_error(const FringeDataset& ds, const FringeModel& model, double b_gauss,
                       double phi_hat, double probe_step_rad = 0.01);

/// Michelson contrast of the repetition-averaged P0.
double fringe_contrast(const FringeDataset& ds);

/// Wrapped a - b and the quadrature-combined error.
std::pair<double, double> phase_difference(const FitResult& a, const FitResult& b);

void write_fringes_csv(std::ostream& out, const FringeDataset& ds);
/// Reads the CSV written above; the noise snapshot is not part of the file.
FringeDataset read_fringes_csv(std::istream& in);

}  // namespace zenophase
