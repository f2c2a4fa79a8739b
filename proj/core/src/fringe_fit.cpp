#include "zenophase/fringe_fit.hpp"

#include "zenophase/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <string_view>

namespace zenophase {

double FringeConfig::window_s() const {
  double w = 0.0;
  for (const auto& s : window) w += s.duration_s;
  return w;
}

void FringeDataset::validate() const {
  if (repetitions < 1) throw DomainError("FringeDataset: repetitions must be >= 1");
  if (t_grid_s.empty()) throw DomainError("FringeDataset: empty delay grid");
  if (!std::is_sorted(t_grid_s.begin(), t_grid_s.end())) {
    throw DomainError("FringeDataset: delay grid must be ascending");
  }
  if (populations.size() != t_grid_s.size() * static_cast<std::size_t>(repetitions)) {
    throw DomainError("FringeDataset: population count does not match grid x repetitions");
  }
  const double slack = std::max(1e-9, 5.0 * noise.sigma_p);
  for (const auto& p : populations) {
    if (std::abs(p[0] + p[1] + p[2] - 1.0) > slack) {
      throw DomainError("FringeDataset: population triple does not sum to 1");
    }
  }
}

namespace {

std::vector<OperatorSegment> window_segments(const FringeConfig& c, const FrameDetunings& eta) {
  std::vector<OperatorSegment> segs;
  segs.reserve(c.window.size());
  for (const auto& w : c.window) {
    if (!(w.duration_s >= 0.0) || w.rabi_hz < 0.0) {
      throw DomainError("FringeConfig: drive segments need duration >= 0 and Rabi >= 0");
    }
    segs.push_back({delay_hamiltonian(c.case_id, {c.delta_hz, w.rabi_hz}, c.epsilon_hz, eta),
                    w.duration_s, c.measured()});
  }
  return segs;
}

Triple f1_triple(const Populations& p) {
  const double s = p[0] + p[1] + p[2];
  if (!(s > 0.0)) throw DomainError("readout: no atoms left in F=1");
  return {p[0] / s, p[1] / s, p[2] / s};
}

}  // namespace

StateVector after_drive_window(const FringeConfig& c) {
  c.schedule.validate();
  const FrameDetunings eta = frame_detunings(c.env, c.nu_rf_mhz, c.mode);
  const StateVector start = zenophase::apply(rf_pulse_unitary(c.rf), atom_down());
  return run_schedule(start, window_segments(c, eta), c.schedule, level::kUp).state;
}

FringeDataset simulate_fringes(const FringeConfig& c, const std::vector<double>& t_grid_s) {
  if (t_grid_s.size() < 8) throw DomainError("simulate_fringes: need at least 8 delays");
  if (!std::is_sorted(t_grid_s.begin(), t_grid_s.end())) {
    throw DomainError("simulate_fringes: delay grid must be ascending");
  }
  if (c.repetitions < 1) throw DomainError("simulate_fringes: repetitions must be >= 1");
  c.noise.validate();
  const double w = c.window_s();
  if (t_grid_s.front() < w) {
    throw DomainError(fmt::format("simulate_fringes: drive window {} s is longer than delay {} s", w,
                                  t_grid_s.front()));
  }

  const FrameDetunings eta = frame_detunings(c.env, c.nu_rf_mhz, c.mode);
  const StateVector windowed = after_drive_window(c);
  const HermitianOperator idle =
      delay_hamiltonian(CaseId::kReference, {c.delta_hz, 0.0}, c.epsilon_hz, eta);
  const CMatrix rf = rf_pulse_unitary(c.rf).matrix();

  FringeDataset ds;
  ds.case_id = case_number(c.case_id);
  ds.t_grid_s = t_grid_s;
  ds.repetitions = c.repetitions;
  ds.noise = c.noise;
  ds.populations.reserve(t_grid_s.size() * static_cast<std::size_t>(c.repetitions));
  for (std::size_t i = 0; i < t_grid_s.size(); ++i) {
    const double rest = t_grid_s[i] - w;
    StateVector psi = windowed;
    if (c.zeno_during_idle) {
      const std::vector<OperatorSegment> seg{{idle, rest, c.measured()}};
      psi = run_schedule(psi, seg, c.schedule, level::kUp).state;
    } else {
      psi = zenophase::apply(evolution_operator(idle.matrix(), rest), psi);
    }
    psi = zenophase::apply(rf, psi);
    for (int r = 0; r < c.repetitions; ++r) {
      std::mt19937_64 rng(mix_seed(c.noise.seed, {c.point_index,
                                                  static_cast<std::uint64_t>(ds.case_id), i,
                                                  static_cast<std::uint64_t>(r)}));
      ds.populations.push_back(f1_triple(stern_gerlach_readout(psi, c.noise, rng)));
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------

FringeModel::FringeModel(MagneticEnvironment env, double nu_rf_mhz, RFPulseSpec rf,
                         BreitRabiMode mode, double reference_offset_hz)
    : env_(env),
      nu_rf_mhz_(nu_rf_mhz),
      rf_(rf),
      mode_(mode),
      reference_offset_hz_(reference_offset_hz),
      pulse_(rf_pulse_unitary(rf).matrix()) {}

Triple FringeModel::Terms::at(double phi) const {
  const cplx e = std::exp(cplx(0.0, phi));
  Triple p{};
  for (std::size_t m = 0; m < 3; ++m) p[m] = std::norm(u[m] + v[m] * e);
  return p;
}

std::vector<FringeModel::Terms> FringeModel::terms(double b_gauss,
                                                   const std::vector<double>& t_grid_s) const {
  MagneticEnvironment env = env_;
  env.b_gauss = b_gauss;
  const FrameDetunings eta = frame_detunings(env, nu_rf_mhz_, mode_);
  const std::array<double, 3> energy{angular(eta.minus_hz), 0.5 * angular(reference_offset_hz_),
                                     angular(eta.plus_hz)};
  std::array<cplx, 3> a{};
  for (std::size_t j = 0; j < 3; ++j) {
    a[j] = pulse_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(level::kDown));
  }
  std::vector<Terms> out(t_grid_s.size());
  for (std::size_t i = 0; i < t_grid_s.size(); ++i) {
    std::array<cplx, 3> b{};
    for (std::size_t j = 0; j < 3; ++j) b[j] = a[j] * std::exp(cplx(0.0, -energy[j] * t_grid_s[i]));
    for (std::size_t m = 0; m < 3; ++m) {
      const auto row = static_cast<Eigen::Index>(m);
      out[i].u[m] = pulse_(row, 0) * b[0] + pulse_(row, 2) * b[2];
      out[i].v[m] = pulse_(row, 1) * b[1];
    }
  }
  return out;
}

Triple FringeModel::populations(double b_gauss, double phi, double t_s) const {
  return terms(b_gauss, {t_s}).front().at(phi);
}

FringeModel model_for(const FringeConfig& c) {
  return FringeModel(c.env, c.nu_rf_mhz, c.rf, c.mode, c.epsilon_hz - c.delta_hz);
}

// ---------------------------------------------------------------------------

namespace {

double ssr_of(const FringeDataset& ds, const std::vector<FringeModel::Terms>& terms, double phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < ds.t_grid_s.size(); ++i) {
    const Triple m = terms[i].at(phi);
    for (int r = 0; r < ds.repetitions; ++r) {
      const Triple& o = ds.at(i, r);
      for (std::size_t k = 0; k < 3; ++k) s += (o[k] - m[k]) * (o[k] - m[k]);
    }
  }
  return s;
}

std::int64_t residual_count(const FringeDataset& ds) {
  return static_cast<std::int64_t>(ds.populations.size()) * 3;
}

// Each F=1 triple sums to one, so it carries two independent residuals.
double residual_variance(double ssr, const FringeDataset& ds) {
  const double dof = 2.0 * static_cast<double>(ds.populations.size()) - 1.0;
  return ssr / std::max(dof, 1.0);
}

constexpr int kBrentBits = 40;

std::vector<double> residuals(const FringeDataset& ds, const std::vector<FringeModel::Terms>& terms,
                              double phi) {
  std::vector<double> out;
  out.reserve(ds.populations.size() * 3);
  for (std::size_t i = 0; i < ds.t_grid_s.size(); ++i) {
    const Triple m = terms[i].at(phi);
    for (int r = 0; r < ds.repetitions; ++r) {
      const Triple& o = ds.at(i, r);
      for (std::size_t k = 0; k < 3; ++k) out.push_back(o[k] - m[k]);
    }
  }
  return out;
}

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Gauss-Newton polish of a one-parameter least-squares minimum; Brent stops
// at about sqrt(machine epsilon) in the abscissa.
template <class Residuals>
std::pair<double, double> polish(Residuals&& res, double x, double h) {
  std::vector<double> r = res(x);
  double ssr = sum_sq(r);
  for (int it = 0; it < 8 && ssr > 0.0; ++it) {
    const std::vector<double> rp = res(x + h);
    const std::vector<double> rm = res(x - h);
    double jr = 0.0;
    double jj = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double j = (rp[i] - rm[i]) / (2.0 * h);
      jr += j * r[i];
      jj += j * j;
    }
    if (!(jj > 0.0)) break;
    const double next = x - jr / jj;
    const std::vector<double> rn = res(next);
    const double sn = sum_sq(rn);
    if (!(sn < ssr)) break;
    const double moved = std::abs(next - x);
    x = next;
    r = rn;
    ssr = sn;
    if (moved < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return {x, ssr};
}

}  // namespace

FitResult fit_magnetic_field(const FringeDataset& ds, const FringeModel& model, double b_prior_gauss) {
  ds.validate();
  if (ds.case_id != 1 && ds.case_id != 2) {
    throw DomainError("fit_magnetic_field: needs a case 1 or case 2 dataset");
  }
  auto ssr_at = [&](double b) { return ssr_of(ds, model.terms(b, ds.t_grid_s), 0.0); };

  constexpr int kHalf = 100;
  constexpr double kStep = 0.05e-3;  // gauss
  int best = -kHalf;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (int k = -kHalf; k <= kHalf; ++k) {
    const double s = ssr_at(b_prior_gauss + k * kStep);
    if (s < best_ssr) {
      best_ssr = s;
      best = k;
    }
  }
  if (best == -kHalf || best == kHalf) {
    throw FitError(fmt::format("fit_magnetic_field: fit window exhausted (best B at edge {} G)",
                               b_prior_gauss + best * kStep));
  }
  const double lo = b_prior_gauss + (best - 1) * kStep;
  const double hi = b_prior_gauss + (best + 1) * kStep;
  std::uintmax_t iters = 200;
  const auto coarse = boost::math::tools::brent_find_minima(ssr_at, lo, hi, kBrentBits, iters);
  const auto [b_hat, ssr] = polish(
      [&](double b) { return residuals(ds, model.terms(b, ds.t_grid_s), 0.0); }, coarse.first, 1e-6);

  const std::int64_t n = residual_count(ds);
  const double h = 1e-6;
  const auto plus = model.terms(b_hat + h, ds.t_grid_s);
  const auto minus = model.terms(b_hat - h, ds.t_grid_s);
  double jtj = 0.0;
  for (std::size_t i = 0; i < ds.t_grid_s.size(); ++i) {
    const Triple p = plus[i].at(0.0);
    const Triple m = minus[i].at(0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      const double d = (p[k] - m[k]) / (2.0 * h);
      jtj += ds.repetitions * d * d;
    }
  }
  FitResult r;
  r.parameter = FitResult::Parameter::kMagneticField;
  r.value = b_hat;
  r.n_points = n;
  r.residual_rms = std::sqrt(ssr / static_cast<double>(n));
  const double s2 = residual_variance(ssr, ds);
  r.std_error = jtj > 0.0 ? std::sqrt(s2 / jtj) : std::numeric_limits<double>::infinity();
  return r;
}

double fringe_contrast(const FringeDataset& ds) {
  ds.validate();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < ds.t_grid_s.size(); ++i) {
    double mean = 0.0;
    for (int r = 0; r < ds.repetitions; ++r) mean += ds.at(i, r)[1];
    mean /= ds.repetitions;
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
  }
  return hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
}

FitResult fit_phase(const FringeDataset& ds, const FringeModel& model, double b_gauss,
                    double probe_step_rad) {
  ds.validate();
  const double contrast = fringe_contrast(ds);
  if (contrast < 0.05) {
    throw FitError(fmt::format("fit_phase: unfittable contrast {}", contrast));
  }
  const auto terms = model.terms(b_gauss, ds.t_grid_s);
  auto ssr_at = [&](double phi) { return ssr_of(ds, terms, phi); };

  constexpr int kGrid = 721;
  const double step = kTwoPi / (kGrid - 1);
  int best = 0;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kGrid; ++k) {
    const double s = ssr_at(-kPi + k * step);
    if (s < best_ssr) {
      best_ssr = s;
      best = k;
    }
  }
  const double centre = -kPi + best * step;
  std::uintmax_t iters = 200;
  const auto coarse =
      boost::math::tools::brent_find_minima(ssr_at, centre - step, centre + step, kBrentBits, iters);
  const auto [phi, ssr] =
      polish([&](double p) { return residuals(ds, terms, p); }, coarse.first, 1e-6);

  FitResult r;
  r.parameter = FitResult::Parameter::kPhase;
  r.value = wrap_phase(phi);
  r.n_points = residual_count(ds);
  r.residual_rms = std::sqrt(ssr / static_cast<double>(r.n_points));
  r.std_error = fit_phase_error(ds, model, b_gauss, r.value, probe_step_rad);
  return r;
}

double fit_phase_error(const FringeDataset& ds, const FringeModel& model, double b_gauss,
                       double phi_hat, double probe_step_rad) {
  ds.validate();
  if (!(probe_step_rad > 0.0)) throw DomainError("fit_phase_error: probe step must be positive");
  const auto terms = model.terms(b_gauss, ds.t_grid_s);
  const double ssr = ssr_of(ds, terms, phi_hat);
  // Residuals at round-off level count as an exact fit.
  if (ssr <= 1e-28 * static_cast<double>(residual_count(ds))) return 0.0;
  double slope = 0.0;
  for (std::size_t i = 0; i < ds.t_grid_s.size(); ++i) {
    const Triple a = terms[i].at(phi_hat);
    const Triple b = terms[i].at(phi_hat + probe_step_rad);
    for (std::size_t k = 0; k < 3; ++k) slope += ds.repetitions * (b[k] - a[k]) * (b[k] - a[k]);
  }
  if (slope < 1e-24) throw FitError("fit_phase_error: flat model at the fitted phase");
  const double s2 = residual_variance(ssr, ds);
  return std::sqrt(s2 * probe_step_rad * probe_step_rad / slope);
}

std::pair<double, double> phase_difference(const FitResult& a, const FitResult& b) {
  if (a.parameter != FitResult::Parameter::kPhase || b.parameter != FitResult::Parameter::kPhase) {
    throw DomainError("phase_difference: both results must be phase fits");
  }
  return {wrap_phase(a.value - b.value), std::hypot(a.std_error, b.std_error)};
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kFringeHeader = "case,T_s,rep,p_m1,p_0,p_p1";

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DomainError(fmt::format("fringe CSV line {}: cannot parse '{}'", line, s));
  }
  return v;
}

}  // namespace

void write_fringes_csv(std::ostream& out, const FringeDataset& ds) {
  ds.validate();
  out << kFringeHeader << '\n';
  for (std::size_t i = 0; i < ds.t_grid_s.size(); ++i) {
    for (int r = 0; r < ds.repetitions; ++r) {
      const Triple& p = ds.at(i, r);
      out << fmt::format("{},{},{},{},{},{}\n", ds.case_id, ds.t_grid_s[i], r, p[0], p[1], p[2]);
    }
  }
  if (!out) throw std::runtime_error("write_fringes_csv: write failed");
}

FringeDataset read_fringes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kFringeHeader) {
    throw DomainError("fringe CSV: missing or unexpected header");
  }
  FringeDataset ds;
  ds.case_id = 0;
  int max_rep = -1;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<std::string_view, 6> f;
    std::string_view rest(line);
    for (std::size_t k = 0; k < 6; ++k) {
      const auto comma = rest.find(',');
      if ((k < 5) == (comma == std::string_view::npos)) {
        throw DomainError(fmt::format("fringe CSV line {}: expected 6 fields", lineno));
      }
      f[k] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    const int c = parse_field<int>(f[0], lineno);
    const double t = parse_field<double>(f[1], lineno);
    const int rep = parse_field<int>(f[2], lineno);
    if (ds.case_id == 0) ds.case_id = c;
    if (c != ds.case_id) throw DomainError(fmt::format("fringe CSV line {}: mixed cases", lineno));
    if (rep == 0) ds.t_grid_s.push_back(t);
    if (ds.t_grid_s.empty() || ds.t_grid_s.back() != t) {
      throw DomainError(fmt::format("fringe CSV line {}: rows out of order", lineno));
    }
    max_rep = std::max(max_rep, rep);
    ds.populations.push_back({parse_field<double>(f[3], lineno), parse_field<double>(f[4], lineno),
                              parse_field<double>(f[5], lineno)});
  }
  if (ds.t_grid_s.empty()) throw DomainError("fringe CSV: no rows");
  ds.repetitions = max_rep + 1;
  ds.validate();
  return ds;
}

}  // namespace zenophase
