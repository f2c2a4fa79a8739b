#pragma once

// Measurement-interrupted evolution: literal projective products, Zeno
// freezing by periodic pulses, free and reference runs, and closed loops
// built from two drive settings.

#include "zenophase/phase_theory.hpp"
#include "zenophase/quantum.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace zenophase {

/// Piecewise-constant two-level drive.
struct EvolutionSegment {
  PolarParams hamiltonian;
  double duration_s = 0.0;
};

/// Piecewise-constant generator of any dimension. `measured` turns the pulse
/// train on for this segment.
struct OperatorSegment {
  HermitianOperator hamiltonian;
  double duration_s = 0.0;
  bool measured = false;
};

enum class PulseModel { kIdeal, kDecay };

/// Periodic measurement pulses: each period is a free gap of length
/// (period - pulse_duration) followed by the pulse window.
struct MeasurementSchedule {
  double period_s = 2e-6;
  double pulse_duration_s = 1.5e-6;
  PulseModel model = PulseModel::kIdeal;
  /// Loss rate of the measured level during a decay pulse (1/s).
  double gamma_per_s = kTwoPi * 6e6;

  void validate() const;
  double gap_s() const { return period_s - pulse_duration_s; }
};

struct ZenoRunResult {
  StateVector final_state;
  /// arg <initial|final>
  double accumulated_phase = 0.0;
  double survival = 0.0;
  std::int64_t n_projections = 0;
};

/// Number of whole periods in `duration` and the remainder. A duration
/// within 1e-9 relative of an integer multiple counts as exact.
struct PeriodSplit {
  std::int64_t whole = 0;
  double remainder_s = 0.0;
};
PeriodSplit split_periods(double duration_s, double period_s);

struct ScheduleRun {
  StateVector state;
  std::int64_t n_projections = 0;
};

/// Evolves `initial` through the segments. With a schedule, every segment is
/// cut into the same gap/pulse intervals; in measured segments the pulse
/// window removes the amplitude of `lossy_index` (ideal: project it out, then
/// evolve under the projected Hamiltonian; decay: add -i Gamma/2 on that
/// level). Unmeasured segments evolve the same intervals unitarily. A partial
/// last period evolves freely for max(0, r - pulse) and then pulses for
/// min(r, pulse). Pulse trains restart at each segment boundary.
ScheduleRun run_schedule(const StateVector& initial, const std::vector<OperatorSegment>& segments,
                         const std::optional<MeasurementSchedule>& schedule,
                         std::size_t lossy_index);

/// Projects successively onto |Psi_k> = U(dt)^k |down>, k = 1..N, with
/// dt = T / N.
ZenoRunResult projective_product(const PolarParams& p, std::int64_t n);

/// Two-level run with periodic pulses that remove |up>.
ZenoRunResult zeno_freeze_run(const std::vector<EvolutionSegment>& segments,
                              const MeasurementSchedule& schedule, const StateVector& initial);

ZenoRunResult free_run(const std::vector<EvolutionSegment>& segments, const StateVector& initial);

/// Uncoupled evolution of |down> under H = eps/2 for time T. With
/// projections, the default pulse train runs over the same intervals; the
/// result is bit-identical to the run without.
ZenoRunResult reference_run(double epsilon_hz, double duration_s, bool with_projections,
                            const MeasurementSchedule& schedule = {});

/// Durations of the three-segment loop h1 (t1), h2 (t2), h1 (t3).
struct LoopSchedule {
  double t1_s = 0.0;
  double t2_s = 0.0;
  double t3_s = 0.0;
  /// 1 - |<down|psi_final>|
  double closure_residual = 0.0;

  double total_s() const { return t1_s + t2_s + t3_s; }
  std::vector<EvolutionSegment> segments(const PolarParams& h1, const PolarParams& h2) const;
};

/// Closed loop starting at |down>: a quarter period under h1, the arc of the
/// h2 circle back to the h1 circle, then h1 again until |down>. Both circles
/// are symmetric under y -> -y, so t3 = t1. Throws NoClosure when no
/// crossing is found or the residual exceeds 1e-10.
LoopSchedule find_closed_loop_schedule(const PolarParams& h1, const PolarParams& h2);

struct ConvergenceRow {
  std::int64_t n = 0;
  double phi_p = 0.0;
  double survival = 0.0;
};

/// projective_product for each N; rows keep input order.
std::vector<ConvergenceRow> convergence_scan(const PolarParams& p,
                                             const std::vector<std::int64_t>& n_list,
                                             std::size_t workers = 1);

struct TracePoint {
  double t_s = 0.0;
  std::vector<double> populations;
  double norm_squared = 0.0;
};

/// Populations at the requested (ascending) times through a run_schedule
/// evolution.
std::vector<TracePoint> trace_schedule(const StateVector& initial,
                                       const std::vector<OperatorSegment>& segments,
                                       const std::optional<MeasurementSchedule>& schedule,
                                       std::size_t lossy_index,
                                       const std::vector<double>& sample_times_s);

/// Largest relative population of `lossy_index` reached at the end of any
/// free gap of a measured run (the leakage each pulse has to remove).
double max_gap_leakage(const StateVector& initial, const std::vector<OperatorSegment>& segments,
                       const MeasurementSchedule& schedule, std::size_t lossy_index);

}  // namespace zenophase
