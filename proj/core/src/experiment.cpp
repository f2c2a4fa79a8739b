#include "zenophase/experiment.hpp"

#include "zenophase/bloch.hpp"
#include "zenophase/errors.hpp"
#include "zenophase/parallel.hpp"
#include "zenophase/phase_theory.hpp"

#include <fmt/format.h>

#include <cmath>

namespace zenophase {

std::vector<DriveSegment> circle_window(double delta_hz, double rabi_hz, int loops) {
  const double omega = std::hypot(delta_hz, rabi_hz);
  if (!(omega > 0.0)) throw DomainError("circle_window: zero drive");
  return {{rabi_hz, loops / omega}};
}

FringeConfig fringe_config(const ExperimentConfig& config, CaseId c, double delta_hz,
                           std::vector<DriveSegment> window, std::uint64_t point_index) {
  FringeConfig f;
  f.case_id = c;
  f.delta_hz = delta_hz;
  f.epsilon_hz = config.drive.epsilon_hz.value_or(delta_hz);
  f.window = std::move(window);
  f.env = config.environment.env;
  f.mode = config.environment.mode;
  f.nu_rf_mhz = config.drive.nu_rf_mhz;
  f.rf = config.drive.rf;
  f.schedule.period_s = config.zeno.period_s;
  f.schedule.pulse_duration_s = config.zeno.pulse_duration_s;
  f.schedule.model = config.zeno.model;
  f.schedule.gamma_per_s = config.zeno.gamma_per_s;
  if (config.zeno.effective_projections > 0) {
    const double duty = config.zeno.pulse_duration_s / config.zeno.period_s;
    f.schedule.period_s = f.window_s() / static_cast<double>(config.zeno.effective_projections);
    f.schedule.pulse_duration_s = f.schedule.period_s * duty;
  }
  f.pulses_enabled = config.zeno.enabled;
  f.zeno_during_idle = config.zeno.during_idle;
  f.noise = config.noise_model();
  f.repetitions = config.noise.repetitions;
  f.point_index = point_index;
  return f;
}

std::vector<CaseOutcome> run_point(const ExperimentConfig& config, const std::vector<CaseId>& cases,
                                   double delta_hz, const std::vector<DriveSegment>& window,
                                   std::uint64_t point_index) {
  if (cases.empty()) throw DomainError("run_point: no cases");
  if (case_coupled(cases.front())) {
    throw DomainError("run_point: the first case must be an uncoupled reference (1 or 2)");
  }
  const std::vector<double> t_grid = config.t_grid();
  std::vector<CaseOutcome> out;
  double b_hat = config.environment.env.b_gauss;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const FringeConfig fc = fringe_config(config, cases[k], delta_hz, window, point_index);
    CaseOutcome o;
    o.case_id = cases[k];
    o.data = simulate_fringes(fc, t_grid);
    const FringeModel model = model_for(fc);
    if (k == 0) {
      o.b_fit = fit_magnetic_field(o.data, model, config.environment.env.b_gauss);
      b_hat = o.b_fit->value;
    }
    o.phi_fit = fit_phase(o.data, model, b_hat, config.run.probe_step_rad);
    out.push_back(std::move(o));
  }
  return out;
}

double dynamical_mismatch(const std::vector<EvolutionSegment>& segments) {
  StateVector psi = qubit_down();
  const StateVector down = qubit_down();
  double total = 0.0;
  for (const auto& s : segments) {
    const CMatrix h = s.hamiltonian.hamiltonian().matrix();
    const double e = psi.amps().dot(h * psi.amps()).real() - down.amps().dot(h * down.amps()).real();
    total -= e * s.duration_s;
    psi = zenophase::apply(su2_propagator(s.hamiltonian.axis(), s.hamiltonian.omega_rad(),
                               s.hamiltonian.epsilon_rad(), s.duration_s),
                psi);
  }
  return total;
}

void apply_figure4_preset(ExperimentConfig& config, char trajectory) {
  switch (trajectory) {
    case 'a':
      config.drive.delta_hz = 16e3;
      config.drive.rabi_hz = 40.4e3;
      config.drive.loops = 2;
      config.drive.switch_rabi_hz.reset();
      break;
    case 'b':
      config.drive.delta_hz = 24e3;
      config.drive.rabi_hz = 36.7e3;
      config.drive.loops = 1;
      config.drive.switch_rabi_hz = 26.4e3;
      break;
    case 'c':
      config.drive.delta_hz = 16e3;
      config.drive.rabi_hz = 36.7e3;
      config.drive.loops = 1;
      config.drive.switch_rabi_hz = 19.9e3;
      break;
    default:
      throw ConfigError(fmt::format("run.figure: unknown Fig. 4 trajectory '{}'", trajectory));
  }
}

namespace {

PhaseRow phase_row(double delta_hz, double rabi_hz, const CaseOutcome& o) {
  return {delta_hz, rabi_hz, case_number(o.case_id), o.phi_fit.value, o.phi_fit.std_error};
}

std::string fringe_stem(std::size_t point, CaseId c) {
  return fmt::format("p{:02d}_case{}", point, case_number(c));
}

void keep(Report& r, const RunOptions& opt, std::size_t point, const CaseOutcome& o) {
  if (opt.keep_fringes) r.fringes.emplace_back(fringe_stem(point, o.case_id), o.data);
}

const CaseOutcome& find_case(const std::vector<CaseOutcome>& v, CaseId c) {
  for (const auto& o : v) {
    if (o.case_id == c) return o;
  }
  throw DomainError("missing case outcome");
}

/// Drive of the configured trajectory: a circle run `loops` times, or a
/// closed two-circle loop when a switch Rabi frequency is set.
struct Trajectory {
  std::vector<DriveSegment> window;
  std::vector<EvolutionSegment> segments;
  std::optional<LoopSchedule> loop;
  std::optional<CapLoopSpec> caps;
  double beta_theory = 0.0;
};

Trajectory configured_trajectory(const ExperimentConfig& config) {
  const double delta = config.drive.delta_hz;
  const double eps = config.drive.epsilon_hz.value_or(delta);
  const PolarParams h1 = from_detuning({delta, config.drive.rabi_hz}, eps);
  Trajectory t;
  if (config.drive.switch_rabi_hz) {
    const PolarParams h2 = from_detuning({delta, *config.drive.switch_rabi_hz}, eps);
    const LoopSchedule s = find_closed_loop_schedule(h1, h2);
    t.loop = s;
    t.segments = s.segments(h1, h2);
    t.window = {{config.drive.rabi_hz, s.t1_s},
                {*config.drive.switch_rabi_hz, s.t2_s},
                {config.drive.rabi_hz, s.t3_s}};
    t.caps = cap_loop_from_schedule(h1, h2, s);
    t.beta_theory = loop_phase_prediction(*t.caps);
  } else {
    t.window = circle_window(delta, config.drive.rabi_hz, config.drive.loops);
    t.segments = {{h1, t.window.front().duration_s}};
    t.beta_theory = loop_phase_prediction(h1.theta, config.drive.loops);
  }
  return t;
}

double window_seconds(const std::vector<DriveSegment>& w) {
  double t = 0.0;
  for (const auto& s : w) t += s.duration_s;
  return t;
}

Table trajectory_table(const std::vector<EvolutionSegment>& segments) {
  const BlochPath path = sample_trajectory(segments, 200, qubit_down());
  Table t{{"t_s", "rx", "ry", "rz"}, {}};
  for (const auto& s : path.samples) t.rows.push_back({s.t_s, s.r.x(), s.r.y(), s.r.z()});
  return t;
}

}  // namespace

Report run_case(const ExperimentConfig& config, CaseId c, const RunOptions& options) {
  config.validate();
  const Trajectory traj = configured_trajectory(config);
  std::vector<CaseId> cases{c};
  if (case_coupled(c)) cases.insert(cases.begin(), CaseId::kReference);
  const auto outcomes = run_point(config, cases, config.drive.delta_hz, traj.window, 0);

  Report r;
  r.name = fmt::format("case{}", case_number(c));
  for (const auto& o : outcomes) {
    r.phases.push_back(phase_row(config.drive.delta_hz, config.drive.rabi_hz, o));
  }
  keep(r, options, 0, outcomes.back());
  const FitResult& b = *outcomes.front().b_fit;
  r.metrics = {{"b_fit_gauss", b.value},
               {"b_fit_err_gauss", b.std_error},
               {"phi_rad", outcomes.back().phi_fit.value},
               {"phi_err_rad", outcomes.back().phi_fit.std_error},
               {"residual_rms", outcomes.back().phi_fit.residual_rms},
               {"window_s", window_seconds(traj.window)}};
  return r;
}

Report run_figure2(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto& sweep = config.scan.sweep_delta_hz;
  const double rabi = config.drive.rabi_hz;
  const auto points = parallel_map(sweep.size(), options.workers, [&](std::size_t i) {
    return run_point(config, {CaseId::kReference, CaseId::kZeno}, sweep[i],
                     circle_window(sweep[i], rabi, config.drive.loops), i);
  });
  Report r;
  r.name = "figure2";
  r.figure.columns = {"delta_hz", "phi1_rad", "phi4_rad", "diff_rad", "diff_err_rad", "theory_rad"};
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& c1 = find_case(points[i], CaseId::kReference);
    const auto& c4 = find_case(points[i], CaseId::kZeno);
    const auto [d, e] = phase_difference(c4.phi_fit, c1.phi_fit);
    r.figure.rows.push_back({sweep[i], c1.phi_fit.value, c4.phi_fit.value, d, e, 0.0});
    for (const auto& o : points[i]) {
      r.phases.push_back(phase_row(sweep[i], rabi, o));
      keep(r, options, i, o);
    }
  }
  return r;
}

Report run_figure3(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto& sweep = config.scan.sweep_delta_hz;
  const double rabi = config.drive.rabi_hz;
  const auto points = parallel_map(sweep.size(), options.workers, [&](std::size_t i) {
    return run_point(config, {CaseId::kReference, CaseId::kFree, CaseId::kZeno}, sweep[i],
                     circle_window(sweep[i], rabi, config.drive.loops), i);
  });
  Report r;
  r.name = "figure3";
  r.figure.columns = {"delta_hz", "phi3_rad", "phi4_rad", "diff_rad", "diff_err_rad",
                      "beta_theory_rad"};
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& c3 = find_case(points[i], CaseId::kFree);
    const auto& c4 = find_case(points[i], CaseId::kZeno);
    const auto [d, e] = phase_difference(c3.phi_fit, c4.phi_fit);
    const double beta = config.drive.loops * kPi * (1.0 - sweep[i] / std::hypot(sweep[i], rabi));
    r.figure.rows.push_back({sweep[i], c3.phi_fit.value, c4.phi_fit.value, d, e, beta});
    for (const auto& o : points[i]) {
      r.phases.push_back(phase_row(sweep[i], rabi, o));
      keep(r, options, i, o);
    }
  }
  return r;
}

Report run_figure4(const ExperimentConfig& base, char trajectory, const RunOptions& options) {
  ExperimentConfig config = base;
  if (config.run.figure_presets) apply_figure4_preset(config, trajectory);
  config.validate();
  const Trajectory traj = configured_trajectory(config);
  const auto outcomes = run_point(config, {CaseId::kReference, CaseId::kFree, CaseId::kZeno},
                                  config.drive.delta_hz, traj.window, 0);
  const auto& c1 = find_case(outcomes, CaseId::kReference);
  const auto& c3 = find_case(outcomes, CaseId::kFree);
  const auto& c4 = find_case(outcomes, CaseId::kZeno);
  const auto [d41, e41] = phase_difference(c4.phi_fit, c1.phi_fit);
  const auto [d34, e34] = phase_difference(c3.phi_fit, c4.phi_fit);
  const double mismatch = dynamical_mismatch(traj.segments);

  Report r;
  r.name = fmt::format("figure4{}", trajectory);
  r.figure.columns = {"trajectory",   "phi1_rad",     "phi3_rad",        "phi4_rad",
                      "diff41_rad",   "diff41_err_rad", "diff34_rad",    "diff34_err_rad",
                      "beta_theory_rad", "dynamical_mismatch_rad", "closure_residual"};
  r.figure.rows.push_back({std::string(1, trajectory), c1.phi_fit.value, c3.phi_fit.value,
                           c4.phi_fit.value, d41, e41, d34, e34, traj.beta_theory, mismatch,
                           traj.loop ? traj.loop->closure_residual : 0.0});
  for (const auto& o : outcomes) {
    r.phases.push_back(phase_row(config.drive.delta_hz, config.drive.rabi_hz, o));
    keep(r, options, 0, o);
  }
  r.tables.emplace_back("trajectory", trajectory_table(traj.segments));
  r.metrics.emplace_back("beta_theory_rad", traj.beta_theory);
  r.metrics.emplace_back("dynamical_mismatch_rad", mismatch);
  if (traj.loop) {
    r.metrics.emplace_back("t1_s", traj.loop->t1_s);
    r.metrics.emplace_back("t2_s", traj.loop->t2_s);
    r.metrics.emplace_back("t3_s", traj.loop->t3_s);
    r.metrics.emplace_back("closure_residual", traj.loop->closure_residual);
    r.metrics.emplace_back("solid_angle_sr", cap_loop_solid_angle(*traj.caps));
    r.notes.emplace_back("region",
                         traj.caps->region == CapRegion::kSmaller ? "smaller" : "larger");
  }
  return r;
}

Report run_appendix_checks(const ExperimentConfig& base, const RunOptions& options) {
  ExperimentConfig config = base;
  config.drive.delta_hz = 0.0;
  config.drive.loops = 1;
  config.drive.switch_rabi_hz.reset();
  config.validate();
  Report r;
  r.name = "appendix";

  // (i) one Rabi cycle on resonance, with and without pulses
  const double rabi = config.drive.rabi_hz;
  const PolarParams p{rabi, 0.5 * kPi, 0.0};
  const std::vector<OperatorSegment> segs{{p.hamiltonian(), p.period_s(), true}};
  MeasurementSchedule sched;
  sched.period_s = config.zeno.period_s;
  sched.pulse_duration_s = config.zeno.pulse_duration_s;
  sched.model = config.zeno.model;
  sched.gamma_per_s = config.zeno.gamma_per_s;
  constexpr int kSamples = 500;
  std::vector<double> times(kSamples + 1);
  for (int k = 0; k <= kSamples; ++k) times[static_cast<std::size_t>(k)] = p.period_s() * k / kSamples;
  times.back() = p.period_s();
  const auto free = trace_schedule(qubit_down(), segs, std::nullopt, 1, times);
  const auto zeno = trace_schedule(qubit_down(), segs, sched, 1, times);
  Table trace{{"t_s", "p_down_free", "p_up_free", "p_down_zeno", "p_up_zeno", "norm_zeno"}, {}};
  double free_min = 1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    trace.rows.push_back({times[k], free[k].populations[0], free[k].populations[1],
                          zeno[k].populations[0], zeno[k].populations[1], zeno[k].norm_squared});
    free_min = std::min(free_min, free[k].populations[0]);
  }
  r.tables.emplace_back("zeno_trace", std::move(trace));
  r.metrics.emplace_back("free_min_p_down", free_min);
  r.metrics.emplace_back("free_final_p_down", free.back().populations[0]);
  r.metrics.emplace_back("zeno_max_gap_leakage", max_gap_leakage(qubit_down(), segs, sched, 1));
  r.metrics.emplace_back("zeno_survival_after_cycle", zeno.back().norm_squared);

  // (ii) fringe exemplars for cases 1, 3 and 4
  const auto window = circle_window(0.0, rabi, 1);
  const auto outcomes =
      run_point(config, {CaseId::kReference, CaseId::kFree, CaseId::kZeno}, 0.0, window, 0);
  for (const auto& o : outcomes) {
    r.phases.push_back(phase_row(0.0, rabi, o));
    keep(r, options, 0, o);
  }
  const auto& c1 = find_case(outcomes, CaseId::kReference);
  const auto& c3 = find_case(outcomes, CaseId::kFree);
  const auto& c4 = find_case(outcomes, CaseId::kZeno);
  r.metrics.emplace_back("b_fit_gauss", c1.b_fit->value);
  r.metrics.emplace_back("phi3_minus_phi1_rad", phase_difference(c3.phi_fit, c1.phi_fit).first);
  r.metrics.emplace_back("phi4_minus_phi1_rad", phase_difference(c4.phi_fit, c1.phi_fit).first);

  // Contrast ratios on noiseless data: with the configured duty cycle and
  // with continuous measurement (no free gaps).
  ExperimentConfig quiet = config;
  quiet.noise.enabled = false;
  quiet.noise.repetitions = 1;
  auto contrast = [&](const ExperimentConfig& cfg, CaseId c) {
    return fringe_contrast(simulate_fringes(fringe_config(cfg, c, 0.0, window, 0), cfg.t_grid()));
  };
  r.metrics.emplace_back("contrast_ratio_4_1",
                         contrast(quiet, CaseId::kZeno) / contrast(quiet, CaseId::kReference));
  ExperimentConfig continuous = quiet;
  continuous.zeno.pulse_duration_s = continuous.zeno.period_s;
  r.metrics.emplace_back("contrast_ratio_4_1_continuous",
                         contrast(continuous, CaseId::kZeno) /
                             contrast(continuous, CaseId::kReference));
  return r;
}

Report run_configured(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  if (config.run.figure) {
    const std::string& f = *config.run.figure;
    if (f == "2") return run_figure2(config, options);
    if (f == "3") return run_figure3(config, options);
    if (f == "appendix") return run_appendix_checks(config, options);
    if (f.size() == 2 && f[0] == '4') return run_figure4(config, f[1], options);
    throw ConfigError("run.figure: unknown figure " + f);
  }
  if (config.run.case_id) return run_case(config, case_from_number(*config.run.case_id), options);
  throw ConfigError("run: set run.figure or run.case (or pass --figure / --case)");
}

}  // namespace zenophase
