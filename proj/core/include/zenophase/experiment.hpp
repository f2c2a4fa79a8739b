#pragma once

// Declarative experiment runner: configuration, case and figure runs, and
// CSV/JSON emission.

#include "zenophase/atom_model.hpp"
#include "zenophase/fringe_fit.hpp"
#include "zenophase/zeno_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace zenophase {

struct EnvironmentSection {
  MagneticEnvironment env;
  BreitRabiMode mode = BreitRabiMode::kCorrected;
};

struct DriveSection {
  double delta_hz = 16e3;
  double rabi_hz = 40.4e3;
  /// Energy offset; unset means eps = delta at every sweep point.
  std::optional<double> epsilon_hz;
  double nu_rf_mhz = 4.323;
  int loops = 1;
  /// Rabi frequency after the switch of a two-circle loop.
  std::optional<double> switch_rabi_hz;
  RFPulseSpec rf;
};

struct ZenoSection {
  bool enabled = true;
  double period_s = 2e-6;
  double pulse_duration_s = 1.5e-6;
  PulseModel model = PulseModel::kIdeal;
  double gamma_per_s = kTwoPi * 6e6;
  bool during_idle = false;
  /// When > 0, the period becomes window / N with the same duty cycle.
  std::int64_t effective_projections = 0;
};

struct ScanSection {
  double t_start_s = 50e-6;
  double t_stop_s = 1050e-6;
  int t_points = 41;
  std::vector<double> sweep_delta_hz;
};

struct NoiseSection {
  bool enabled = true;
  double sigma_p = 0.02;
  std::int64_t atom_number = 0;
  std::uint64_t seed = 2019;
  int repetitions = 5;
};

struct RunSection {
  std::optional<int> case_id;
  std::optional<std::string> figure;
  std::string out_dir = "out";
  std::string format = "both";
  double probe_step_rad = 0.01;
  /// Figure 4 runs use the preset trajectory parameters.
  bool figure_presets = true;
};

struct ExperimentConfig {
  EnvironmentSection environment;
  DriveSection drive;
  ZenoSection zeno;
  ScanSection scan;
  NoiseSection noise;
  RunSection run;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  std::vector<double> t_grid() const;
  NoiseModel noise_model() const;
};

ExperimentConfig default_config();
/// Default -48..48 kHz sweep in 8 kHz steps.
std::vector<double> default_sweep();

/// TOML with sections [environment], [drive], [zeno], [scan], [noise], [run].
/// Unknown keys are errors.
ExperimentConfig parse_config_toml(std::string_view text, std::string_view source = "<config>");
/// JSON with the same layout, or an emitted result document carrying it
/// under "config".
ExperimentConfig parse_config_json(std::string_view text, std::string_view source = "<config>");
/// Dispatches on the extension (.json, otherwise TOML).
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical compact JSON of the fully resolved config.
std::string config_json(const ExperimentConfig& config);
/// SHA-1 of "blob <len>\0" + config_json, hex.
std::string config_hash(const ExperimentConfig& config);

// ---------------------------------------------------------------------------

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct PhaseRow {
  double delta_hz = 0.0;
  double rabi_hz = 0.0;
  int case_id = 1;
  double phi_rad = 0.0;
  double phi_err_rad = 0.0;
};

struct Report {
  std::string name;
  std::vector<PhaseRow> phases;
  /// Figure table; columns empty when the run has none.
  Table figure;
  std::vector<std::pair<std::string, FringeDataset>> fringes;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, std::string>> notes;
};

struct RunOptions {
  std::size_t workers = 1;
  /// Keep per-case fringe datasets in the report.
  bool keep_fringes = true;
};

/// Result of one case at one sweep point.
struct CaseOutcome {
  CaseId case_id = CaseId::kReference;
  FringeDataset data;
  std::optional<FitResult> b_fit;
  FitResult phi_fit;
};

/// Drive window of a single circle traversed `loops` times.
std::vector<DriveSegment> circle_window(double delta_hz, double rabi_hz, int loops);

/// Fringe configuration for one case at one sweep point.
FringeConfig fringe_config(const ExperimentConfig& config, CaseId c, double delta_hz,
                           std::vector<DriveSegment> window, std::uint64_t point_index);

/// Simulates and fits cases in order. The first case must be 1 or 2; its B
/// fit is reused for the phase fits of the others.
std::vector<CaseOutcome> run_point(const ExperimentConfig& config, const std::vector<CaseId>& cases,
                                   double delta_hz, const std::vector<DriveSegment>& window,
                                   std::uint64_t point_index);

Report run_case(const ExperimentConfig& config, CaseId c, const RunOptions& options = {});
Report run_figure2(const ExperimentConfig& config, const RunOptions& options = {});
Report run_figure3(const ExperimentConfig& config, const RunOptions& options = {});
/// trajectory is 'a', 'b' or 'c'.
Report run_figure4(const ExperimentConfig& config, char trajectory, const RunOptions& options = {});
Report run_appendix_checks(const ExperimentConfig& config, const RunOptions& options = {});
/// Dispatches on run.figure, then run.case.
Report run_configured(const ExperimentConfig& config, const RunOptions& options = {});

/// Applies the preset drive parameters of figure 4 trajectory a, b or c.
void apply_figure4_preset(ExperimentConfig& config, char trajectory);

/// -integral of (<psi|H|psi> - <down|H|down>) over a loop schedule.
double dynamical_mismatch(const std::vector<EvolutionSegment>& segments);

// ---------------------------------------------------------------------------

/// Formats a double with the shortest round-trip representation.
std::string format_double(double v);
std::string table_csv(const Table& table);
std::string phases_csv(const std::vector<PhaseRow>& rows);
std::string report_json(const Report& report, const ExperimentConfig& config);

/// Writes the report files under out_dir; returns the paths written.
std::vector<std::filesystem::path> emit(const Report& report, const ExperimentConfig& config,
                                        const std::filesystem::path& out_dir,
                                        std::string_view format);

}  // namespace zenophase
