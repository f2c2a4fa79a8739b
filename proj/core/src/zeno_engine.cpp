#include "zenophase/zeno_engine.hpp"

#include "zenophase/bloch.hpp"
#include "zenophase/errors.hpp"
#include "zenophase/parallel.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace zenophase {

void MeasurementSchedule::validate() const {
  if (!(period_s > 0.0) || !std::isfinite(period_s)) {
    throw DomainError("MeasurementSchedule: period must be positive");
  }
  if (!(pulse_duration_s > 0.0) || pulse_duration_s > period_s) {
    throw DomainError("MeasurementSchedule: need 0 < pulse_duration <= period");
  }
  if (model == PulseModel::kDecay && !(gamma_per_s > 0.0)) {
    throw DomainError("MeasurementSchedule: decay rate must be positive");
  }
}

PeriodSplit split_periods(double duration_s, double period_s) {
  if (!(duration_s >= 0.0)) throw DomainError("split_periods: negative duration");
  const double ratio = duration_s / period_s;
  const double nearest = std::round(ratio);
  PeriodSplit s;
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest) {
    s.whole = static_cast<std::int64_t>(nearest);
    s.remainder_s = 0.0;
    return s;
  }
  const double whole = std::floor(ratio);
  s.whole = static_cast<std::int64_t>(whole);
  s.remainder_s = std::max(0.0, duration_s - whole * period_s);
  return s;
}

namespace {

// Visits the gap/pulse intervals of each segment in time order:
// fn(segment_index, duration, is_pulse_window).
template <typename Fn>
void for_each_interval(const std::vector<OperatorSegment>& segments,
                       const std::optional<MeasurementSchedule>& schedule, Fn&& fn) {
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const double d = segments[s].duration_s;
    if (!schedule) {
      if (d > 0.0) fn(s, d, false);
      continue;
    }
    const double gap = schedule->gap_s();
    const double pulse = schedule->pulse_duration_s;
    const PeriodSplit split = split_periods(d, schedule->period_s);
    for (std::int64_t k = 0; k < split.whole; ++k) {
      if (gap > 0.0) fn(s, gap, false);
      fn(s, pulse, true);
    }
    const double r = split.remainder_s;
    if (r > 0.0) {
      const double free_part = std::max(0.0, r - pulse);
      if (free_part > 0.0) fn(s, free_part, false);
      fn(s, std::min(r, pulse), true);
    }
  }
}

CMatrix keep_mask(std::size_t dim, std::size_t lossy) {
  CMatrix p = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  p(static_cast<Eigen::Index>(lossy), static_cast<Eigen::Index>(lossy)) = 0.0;
  return p;
}

// Propagator of one pulse window of length d.
CMatrix pulse_propagator(const OperatorSegment& seg, const MeasurementSchedule& sched,
                         std::size_t lossy, double d) {
  const CMatrix& h = seg.hamiltonian.matrix();
  if (!seg.measured) return evolution_operator(h, d);
  const auto l = static_cast<Eigen::Index>(lossy);
  if (sched.model == PulseModel::kIdeal) {
    const CMatrix p = keep_mask(static_cast<std::size_t>(h.rows()), lossy);
    const CMatrix php = p * h * p;
    return evolution_operator(php, d) * p;
  }
  CMatrix g = h;
  g(l, l) -= cplx(0.0, 0.5 * sched.gamma_per_s);
  return evolution_operator(g, d);
}

void check_segments(const StateVector& initial, const std::vector<OperatorSegment>& segments,
                    std::size_t lossy) {
  if (lossy >= initial.dim()) throw DomainError("run_schedule: lossy index out of range");
  for (const auto& s : segments) {
    if (s.hamiltonian.dim() != initial.dim()) {
      throw DomainError("run_schedule: segment dimension does not match the state");
    }
    if (!(s.duration_s >= 0.0) || !std::isfinite(s.duration_s)) {
      throw DomainError("run_schedule: segment duration must be finite and >= 0");
    }
  }
}

// Cached propagators for the full gap and the full pulse of each segment.
struct SegmentCache {
  CMatrix gap;
  CMatrix pulse;
};

std::vector<SegmentCache> build_cache(const std::vector<OperatorSegment>& segments,
                                      const std::optional<MeasurementSchedule>& schedule,
                                      std::size_t lossy) {
  std::vector<SegmentCache> cache;
  if (!schedule) return cache;
  cache.reserve(segments.size());
  for (const auto& s : segments) {
    SegmentCache c;
    c.gap = evolution_operator(s.hamiltonian.matrix(), schedule->gap_s());
    c.pulse = pulse_propagator(s, *schedule, lossy, schedule->pulse_duration_s);
    cache.push_back(std::move(c));
  }
  return cache;
}

const CMatrix* cached(const std::vector<SegmentCache>& cache,
                      const std::optional<MeasurementSchedule>& schedule, std::size_t s,
                      double d, bool pulse) {
  if (!schedule) return nullptr;
  if (pulse && d == schedule->pulse_duration_s) return &cache[s].pulse;
  if (!pulse && d == schedule->gap_s()) return &cache[s].gap;
  return nullptr;
}

CMatrix interval_propagator(const OperatorSegment& seg,
                            const std::optional<MeasurementSchedule>& schedule,
                            std::size_t lossy, double d, bool pulse) {
  if (pulse) return pulse_propagator(seg, *schedule, lossy, d);
  return evolution_operator(seg.hamiltonian.matrix(), d);
}

}  // namespace

ScheduleRun run_schedule(const StateVector& initial, const std::vector<OperatorSegment>& segments,
                         const std::optional<MeasurementSchedule>& schedule,
                         std::size_t lossy_index) {
  if (schedule) schedule->validate();
  check_segments(initial, segments, lossy_index);
  const auto cache = build_cache(segments, schedule, lossy_index);
  CVector psi = initial.amps();
  std::int64_t projections = 0;
  for_each_interval(segments, schedule, [&](std::size_t s, double d, bool pulse) {
    if (const CMatrix* m = cached(cache, schedule, s, d, pulse)) {
      psi = (*m) * psi;
    } else {
      psi = interval_propagator(segments[s], schedule, lossy_index, d, pulse) * psi;
    }
    if (pulse && segments[s].measured) ++projections;
  });
  // Long products of unitaries can drift a hair above unit norm.
  const double n2 = psi.squaredNorm();
  if (n2 > 1.0 && n2 < 1.0 + 1e-9) psi /= std::sqrt(n2);
  return {initial.with_amps(std::move(psi)), projections};
}

std::vector<TracePoint> trace_schedule(const StateVector& initial,
                                       const std::vector<OperatorSegment>& segments,
                                       const std::optional<MeasurementSchedule>& schedule,
                                       std::size_t lossy_index,
                                       const std::vector<double>& sample_times_s) {
  if (schedule) schedule->validate();
  check_segments(initial, segments, lossy_index);
  if (!std::is_sorted(sample_times_s.begin(), sample_times_s.end())) {
    throw DomainError("trace_schedule: sample times must be ascending");
  }
  double total = 0.0;
  for (const auto& s : segments) total += s.duration_s;
  if (!sample_times_s.empty() &&
      (sample_times_s.front() < 0.0 || sample_times_s.back() > total * (1.0 + 1e-12))) {
    throw DomainError("trace_schedule: sample time outside the evolution");
  }

  auto record = [](double t, const CVector& v) {
    TracePoint p;
    p.t_s = t;
    p.norm_squared = v.squaredNorm();
    p.populations.resize(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      p.populations[static_cast<std::size_t>(i)] = std::norm(v(i));
    }
    return p;
  };

  std::vector<TracePoint> out;
  out.reserve(sample_times_s.size());
  std::size_t next = 0;
  CVector psi = initial.amps();
  double t0 = 0.0;
  while (next < sample_times_s.size() && sample_times_s[next] <= 0.0) {
    out.push_back(record(sample_times_s[next], psi));
    ++next;
  }
  for_each_interval(segments, schedule, [&](std::size_t s, double d, bool pulse) {
    const double t1 = t0 + d;
    while (next < sample_times_s.size() && sample_times_s[next] < t1) {
      const double partial = sample_times_s[next] - t0;
      const CVector v = interval_propagator(segments[s], schedule, lossy_index, partial, pulse) * psi;
      out.push_back(record(sample_times_s[next], v));
      ++next;
    }
    psi = interval_propagator(segments[s], schedule, lossy_index, d, pulse) * psi;
    t0 = t1;
  });
  while (next < sample_times_s.size()) {
    out.push_back(record(sample_times_s[next], psi));
    ++next;
  }
  return out;
}

double max_gap_leakage(const StateVector& initial, const std::vector<OperatorSegment>& segments,
                       const MeasurementSchedule& schedule, std::size_t lossy_index) {
  schedule.validate();
  check_segments(initial, segments, lossy_index);
  const std::optional<MeasurementSchedule> sched = schedule;
  CVector psi = initial.amps();
  double start_norm = psi.squaredNorm();
  double worst = 0.0;
  const auto l = static_cast<Eigen::Index>(lossy_index);
  for_each_interval(segments, sched, [&](std::size_t s, double d, bool pulse) {
    psi = interval_propagator(segments[s], sched, lossy_index, d, pulse) * psi;
    if (!pulse && segments[s].measured && start_norm > 0.0) {
      worst = std::max(worst, std::norm(psi(l)) / start_norm);
    }
    if (pulse) start_norm = psi.squaredNorm();
  });
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

ZenoRunResult make_result(const StateVector& initial, ScheduleRun run) {
  ZenoRunResult r{run.state, 0.0, 0.0, run.n_projections};
  r.survival = run.state.norm_squared();
  const cplx a = overlap(initial, run.state);
  r.accumulated_phase = std::arg(a);
  return r;
}

std::vector<OperatorSegment> to_operator_segments(const std::vector<EvolutionSegment>& segments,
                                                  bool measured) {
  std::vector<OperatorSegment> out;
  out.reserve(segments.size());
  for (const auto& s : segments) {
    out.push_back({s.hamiltonian.hamiltonian(), s.duration_s, measured});
  }
  return out;
}

void check_qubit(const StateVector& psi, const char* what) {
  if (psi.dim() != 2) throw DomainError(std::string(what) + ": initial state must be two-level");
}

}  // namespace

ZenoRunResult projective_product(const PolarParams& p, std::int64_t n) {
  p.validate();
  if (n < 1) throw DomainError("projective_product: N must be >= 1");
  const Vec3 axis = p.axis();
  const double dt = p.period_s() / static_cast<double>(n);
  const StateVector psi0 = qubit_down();
  CVector psi = psi0.amps();
  CVector prev = psi0.amps();
  for (std::int64_t k = 1; k <= n; ++k) {
    const double t = dt * static_cast<double>(k);
    const CVector target =
        su2_propagator(axis, p.omega_rad(), p.epsilon_rad(), t).matrix() * psi0.amps();
    const cplx factor = target.dot(prev);
    if (std::abs(factor) < 1e-12) {
      throw ExtinguishedTrajectory("projective_product: consecutive states orthogonal at step " +
                                   std::to_string(k));
    }
    const cplx amp = target.dot(psi);
    if (std::abs(amp) < 1e-300) {
      throw ExtinguishedTrajectory("projective_product: amplitude extinguished at step " +
                                   std::to_string(k));
    }
    psi = target * amp;
    prev = target;
  }
  ZenoRunResult r{psi0.with_amps(psi), 0.0, 0.0, n};
  r.survival = psi.squaredNorm();
  r.accumulated_phase = std::arg(psi0.amps().dot(psi));
  return r;
}

ZenoRunResult zeno_freeze_run(const std::vector<EvolutionSegment>& segments,
                              const MeasurementSchedule& schedule, const StateVector& initial) {
  if (segments.empty()) throw DomainError("zeno_freeze_run: no segments");
  check_qubit(initial, "zeno_freeze_run");
  return make_result(initial, run_schedule(initial, to_operator_segments(segments, true),
                                           schedule, 1));
}

ZenoRunResult free_run(const std::vector<EvolutionSegment>& segments, const StateVector& initial) {
  check_qubit(initial, "free_run");
  CVector psi = initial.amps();
  for (const auto& s : segments) {
    s.hamiltonian.validate();
    if (!(s.duration_s >= 0.0)) throw DomainError("free_run: negative duration");
    psi = su2_propagator(s.hamiltonian.axis(), s.hamiltonian.omega_rad(),
                         s.hamiltonian.epsilon_rad(), s.duration_s)
              .matrix() *
          psi;
  }
  return make_result(initial, {initial.with_amps(std::move(psi)), 0});
}

ZenoRunResult reference_run(double epsilon_hz, double duration_s, bool with_projections,
                            const MeasurementSchedule& schedule) {
  if (!(duration_s >= 0.0)) throw DomainError("reference_run: T must be >= 0");
  const HermitianOperator h = su2_hamiltonian(Vec3(0.0, 0.0, 1.0), 0.0, angular(epsilon_hz));
  const std::vector<OperatorSegment> segs{{h, duration_s, with_projections}};
  const StateVector psi0 = qubit_down();
  return make_result(psi0, run_schedule(psi0, segs, schedule, 1));
}

// ---------------------------------------------------------------------------

std::vector<EvolutionSegment> LoopSchedule::segments(const PolarParams& h1,
                                                     const PolarParams& h2) const {
  return {{h1, t1_s}, {h2, t2_s}, {h1, t3_s}};
}

LoopSchedule find_closed_loop_schedule(const PolarParams& h1, const PolarParams& h2) {
  h1.validate();
  h2.validate();
  const StateVector down = qubit_down();
  auto residual_of = [&](const LoopSchedule& s) {
    const ZenoRunResult r = free_run(s.segments(h1, h2), down);
    return 1.0 - std::abs(overlap(down, r.final_state));
  };

  if (h1.omega_hz == h2.omega_hz && h1.theta == h2.theta) {
    LoopSchedule s{0.5 * h1.period_s(), 0.0, 0.5 * h1.period_s(), 0.0};
    s.closure_residual = residual_of(s);
    return s;
  }

  const Vec3 n1 = h1.axis();
  const double target = n1.dot(Vec3(0.0, 0.0, -1.0));
  const double t1 = 0.25 * h1.period_s();
  const StateVector p =
      zenophase::apply(su2_propagator(n1, h1.omega_rad(), h1.epsilon_rad(), t1), down);
  auto g = [&](double t2) {
    const StateVector q = zenophase::apply(su2_propagator(h2.axis(), h2.omega_rad(), 0.0, t2), p);
    return n1.dot(bloch_vector(q)) - target;
  };

  constexpr int kScan = 2048;
  const double t_max = h2.period_s() * (1.0 - 1e-9);
  double prev_t = t_max / kScan;
  double prev_g = g(prev_t);
  double best = std::abs(prev_g);
  std::optional<std::pair<double, double>> bracket;
  for (int k = 2; k <= kScan; ++k) {
    const double t = t_max * k / kScan;
    const double gt = g(t);
    best = std::min(best, std::abs(gt));
    if (gt == 0.0 || (gt > 0.0) != (prev_g > 0.0)) {
      bracket = std::make_pair(prev_t, t);
      break;
    }
    prev_t = t;
    prev_g = gt;
  }
  if (!bracket) {
    throw NoClosure("find_closed_loop_schedule: the h2 circle never returns to the h1 circle",
                    best);
  }

  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(
      g, bracket->first, bracket->second, boost::math::tools::eps_tolerance<double>(52),
      iterations);
  LoopSchedule s{t1, 0.5 * (root.first + root.second), t1, 0.0};
  s.closure_residual = residual_of(s);
  if (!(s.closure_residual < 1e-10)) {
    throw NoClosure("find_closed_loop_schedule: closure residual " +
                        std::to_string(s.closure_residual) + " exceeds 1e-10",
                    s.closure_residual);
  }
  return s;
}

std::vector<ConvergenceRow> convergence_scan(const PolarParams& p,
                                             const std::vector<std::int64_t>& n_list,
                                             std::size_t workers) {
  p.validate();
  if (n_list.empty()) throw DomainError("convergence_scan: empty N list");
  if (!std::is_sorted(n_list.begin(), n_list.end())) {
    throw DomainError("convergence_scan: N list must be ascending");
  }
  const double phi0 = total_phase(p);
  return parallel_map(n_list.size(), workers, [&](std::size_t i) {
    const ZenoRunResult r = projective_product(p, n_list[i]);
    return ConvergenceRow{n_list[i], wrap_phase(r.accumulated_phase - phi0), r.survival};
  });
}

}  // namespace zenophase
