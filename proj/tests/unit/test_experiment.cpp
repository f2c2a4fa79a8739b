#include "support/oracles.hpp"
#include "zenophase/errors.hpp"
#include "zenophase/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace zenophase;
namespace fs = std::filesystem;

namespace {

ExperimentConfig quiet() {
  auto c = default_config();
  c.noise.enabled = false;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double cell(const Table& t, std::size_t row, const std::string& column) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    if (t.columns[k] == column) return std::get<double>(t.rows.at(row).at(k));
  }
  throw std::out_of_range(column);
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("zenophase_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, DefaultsValidate) {
  const auto c = default_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.scan.sweep_delta_hz.size(), 13u);
  EXPECT_EQ(c.scan.sweep_delta_hz.front(), -48e3);
  EXPECT_EQ(c.scan.sweep_delta_hz.back(), 48e3);
  EXPECT_EQ(c.t_grid().size(), 41u);
  EXPECT_EQ(c.noise_model().sigma_p, 0.02);
  EXPECT_EQ(quiet().noise_model().sigma_p, 0.0);
}

TEST(Config, ShippedFileParses) {
  const auto c = load_config(fs::path(ZENOPHASE_SOURCE_DIR) / "configs" / "default.toml");
  EXPECT_EQ(c.run.figure.value_or(""), "2");
  EXPECT_EQ(c.noise.seed, 2019u);
  EXPECT_EQ(config_json(c), config_json([] {
              auto d = default_config();
              d.run.figure = "2";
              return d;
            }()));
}

TEST(Config, UnknownKeysAreErrors) {
  try {
    parse_config_toml("[zeno]\nperiod_s = 2e-6\ntau = 3\n[noise]\nseed = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("zeno.tau"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config_toml("[plots]\nx = 1\n"), ConfigError);
}

TEST(Config, FieldLevelValidation) {
  try {
    parse_config_toml("[zeno]\nperiod_s = -1.0\n[noise]\nseed = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("zeno.period_s"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config_toml("[drive]\nrabi_hz = \"fast\"\n[noise]\nseed = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_toml("[scan]\nsweep_delta_hz = []\n[noise]\nseed = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_toml("[run]\nfigure = \"5\"\n[noise]\nseed = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_toml("not = [valid"), ConfigError);
}

TEST(Config, SeedRequiredWithNoise) {
  EXPECT_THROW(parse_config_toml("[noise]\nsigma_p = 0.02\n"), ConfigError);
  EXPECT_NO_THROW(parse_config_toml("[noise]\nenabled = false\n"));
  EXPECT_EQ(parse_config_toml("[noise]\nseed = 99\n").noise.seed, 99u);
}

TEST(Config, JsonRoundTrip) {
  auto c = default_config();
  c.run.figure = "4b";
  c.drive.epsilon_hz = 1234.5;
  c.zeno.model = PulseModel::kDecay;
  const auto back = parse_config_json(config_json(c));
  EXPECT_EQ(config_json(back), config_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));

  Report r;
  r.name = "x";
  const auto from_report = parse_config_json(report_json(r, c));
  EXPECT_EQ(config_json(from_report), config_json(c));
}

TEST(Config, HashIsGitBlobStyle) {
  const auto c = default_config();
  const std::string h = config_hash(c);
  EXPECT_EQ(h.size(), 40u);
  EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
  auto d = c;
  d.noise.seed += 1;
  EXPECT_NE(config_hash(d), h);
}

TEST(RunCase, ReferenceRecoversField) {
  auto c = default_config();
  const auto r = run_case(c, CaseId::kReference);
  ASSERT_EQ(r.phases.size(), 1u);
  double b = 0.0;
  for (const auto& [k, v] : r.metrics) {
    if (k == "b_fit_gauss") b = v;
  }
  EXPECT_NEAR(b, 6.179, 1e-5);
  EXPECT_EQ(r.fringes.size(), 1u);
}

TEST(RunCase, ProjectedReferenceMatchesReference) {
  const auto c = default_config();
  const auto p = run_point(c, {CaseId::kReference, CaseId::kReferenceProjected}, 16e3,
                           circle_window(16e3, 40.4e3, 1), 0);
  const auto [d, e] = phase_difference(p[0].phi_fit, p[1].phi_fit);
  EXPECT_LT(std::abs(d), 3.0 * e);
  const auto q = quiet();
  const auto n = run_point(q, {CaseId::kReference, CaseId::kReferenceProjected}, 16e3,
                           circle_window(16e3, 40.4e3, 1), 0);
  EXPECT_EQ(n[0].data.populations, n[1].data.populations);
}

TEST(RunCase, ZenoPointConsistentWithZero) {
  const auto c = default_config();
  const auto p = run_point(c, {CaseId::kReference, CaseId::kZeno}, 16e3, circle_window(16e3, 40.4e3, 1), 0);
  const auto [d, e] = phase_difference(p[1].phi_fit, p[0].phi_fit);
  EXPECT_LT(std::abs(d), 3.0 * e);
}

TEST(RunPoint, FirstCaseMustBeReference) {
  EXPECT_THROW(run_point(quiet(), {CaseId::kFree}, 0.0, circle_window(0.0, 40.4e3, 1), 0), DomainError);
}

TEST(Figure2, NoiselessNullWithDenseProjections) {
  auto c = quiet();
  c.scan.sweep_delta_hz = {-48e3, -32e3, -16e3, 0.0, 16e3, 32e3, 48e3};
  c.zeno.effective_projections = 10000;
  const auto r = run_figure2(c, {4, false});
  ASSERT_EQ(r.figure.rows.size(), 7u);
  for (std::size_t i = 0; i < r.figure.rows.size(); ++i) {
    EXPECT_LT(std::abs(cell(r.figure, i, "diff_rad")), 1e-3);
    EXPECT_EQ(cell(r.figure, i, "theory_rad"), 0.0);
  }
}

TEST(Figure2, ResonantPointIsExactlyZero) {
  auto c = quiet();
  c.scan.sweep_delta_hz = {0.0};
  c.zeno.pulse_duration_s = c.zeno.period_s;
  const auto r = run_figure2(c);
  EXPECT_NEAR(cell(r.figure, 0, "diff_rad"), 0.0, 1e-12);
}

TEST(Figure3, SchemaAndCurve) {
  auto c = quiet();
  c.zeno.effective_projections = 10000;
  const auto r = run_figure3(c, {4, false});
  EXPECT_EQ(r.figure.columns, (std::vector<std::string>{"delta_hz", "phi3_rad", "phi4_rad", "diff_rad",
                                                        "diff_err_rad", "beta_theory_rad"}));
  for (std::size_t i = 0; i < r.figure.rows.size(); ++i) {
    const double d = cell(r.figure, i, "delta_hz");
    const double beta = kPi * (1.0 - d / std::hypot(d, 40.4e3));
    EXPECT_NEAR(cell(r.figure, i, "beta_theory_rad"), beta, 1e-15);
    EXPECT_LT(oracle::angle_distance(cell(r.figure, i, "diff_rad"), beta), 1e-3) << d;
    if (d == 16e3) EXPECT_NEAR(cell(r.figure, i, "diff_rad"), 1.9848, 1e-3);
    if (d == 0.0) EXPECT_LT(oracle::angle_distance(cell(r.figure, i, "diff_rad"), kPi), 1e-3);
  }
  const auto header = table_csv(r.figure).substr(0, table_csv(r.figure).find('\n'));
  EXPECT_EQ(header, "delta_hz,phi3_rad,phi4_rad,diff_rad,diff_err_rad,beta_theory_rad");
}

TEST(Figure4, DoubleLoop) {
  const auto r = run_figure4(quiet(), 'a');
  EXPECT_NEAR(cell(r.figure, 0, "diff34_rad"), -2.3136, 1e-3);
  EXPECT_LT(std::abs(cell(r.figure, 0, "diff41_rad")), 1e-3);
  EXPECT_NEAR(cell(r.figure, 0, "beta_theory_rad"), -2.3136, 2e-4);
  EXPECT_NEAR(cell(r.figure, 0, "dynamical_mismatch_rad"), 0.0, 1e-9);
}

// On the two-circle loops case 3 also picks up a dynamical phase relative to
// the reference; the simulated difference is beta plus that mismatch.
TEST(Figure4, SwitchedLoops) {
  for (char t : {'b', 'c'}) {
    const auto r = run_figure4(quiet(), t);
    const double beta = cell(r.figure, 0, "beta_theory_rad");
    const double mismatch = cell(r.figure, 0, "dynamical_mismatch_rad");
    EXPECT_LT(cell(r.figure, 0, "closure_residual"), 1e-10);
    EXPECT_LT(std::abs(cell(r.figure, 0, "diff41_rad")), 1e-3) << t;
    EXPECT_LT(oracle::angle_distance(cell(r.figure, 0, "diff34_rad"), beta + mismatch), 1e-3) << t;
    EXPECT_GT(std::abs(mismatch), 0.1);
  }
}

TEST(Figure4, PresetsCanBeDisabled) {
  auto c = quiet();
  c.run.figure_presets = false;
  c.drive.delta_hz = 10e3;
  c.drive.rabi_hz = 30e3;
  c.drive.loops = 1;
  const auto r = run_figure4(c, 'a');
  const double theta = std::atan2(30e3, 10e3);
  EXPECT_NEAR(cell(r.figure, 0, "beta_theory_rad"), wrap_phase(kPi * (1.0 - std::cos(theta))), 1e-12);
  EXPECT_THROW(run_figure4(quiet(), 'd'), ConfigError);
}

TEST(Appendix, Metrics) {
  const auto r = run_appendix_checks(quiet());
  auto metric = [&](const std::string& k) {
    for (const auto& [name, v] : r.metrics) {
      if (name == k) return v;
    }
    throw std::out_of_range(k);
  };
  EXPECT_LT(metric("free_min_p_down"), 1e-9);
  EXPECT_NEAR(metric("free_final_p_down"), 1.0, 1e-9);
  EXPECT_LT(metric("zeno_max_gap_leakage"), 0.07);
  EXPECT_GT(metric("zeno_survival_after_cycle"), 0.9);
  EXPECT_LT(oracle::angle_distance(metric("phi3_minus_phi1_rad"), kPi), 1e-6);
  EXPECT_NEAR(metric("contrast_ratio_4_1_continuous"), 1.0, 1e-6);
  EXPECT_EQ(r.fringes.size(), 3u);
}

TEST(DynamicalMismatch, SingleCircleIsZero) {
  const auto h = from_detuning({16e3, 40.4e3}, 16e3);
  EXPECT_NEAR(dynamical_mismatch({{h, 2.0 * h.period_s()}}), 0.0, 1e-12);
}

TEST(Emit, DeterministicAcrossRunsAndWorkers) {
  auto c = default_config();
  c.scan.sweep_delta_hz = {-16e3, 0.0, 16e3};
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto pa = emit(run_figure2(c, {1, true}), c, a, "both");
  const auto pb = emit(run_figure2(c, {3, true}), c, b, "both");
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].filename(), pb[i].filename());
    EXPECT_EQ(slurp(pa[i]), slurp(pb[i])) << pa[i];
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Emit, FormatsAndFiles) {
  auto c = quiet();
  c.scan.sweep_delta_hz = {0.0};
  const auto r = run_figure3(c);
  const auto dir = scratch("formats");
  const auto csv = emit(r, c, dir, "csv");
  for (const auto& p : csv) EXPECT_EQ(p.extension(), ".csv");
  EXPECT_TRUE(fs::exists(dir / "figure3.csv"));
  EXPECT_TRUE(fs::exists(dir / "figure3_phases.csv"));
  EXPECT_EQ(slurp(dir / "figure3_phases.csv").substr(0, 38), "delta_hz,rabi_hz,case,phi_rad,phi_err_");
  const auto json = emit(r, c, dir, "json");
  ASSERT_EQ(json.size(), 1u);
  EXPECT_EQ(json[0].filename(), "figure3.json");
  EXPECT_THROW(emit(r, c, dir, "xml"), ConfigError);
  fs::remove_all(dir);
}

TEST(Emit, IoErrorsNameThePath) {
  const auto file = scratch("blocker");
  std::ofstream(file) << "x";
  Report r;
  r.name = "x";
  try {
    emit(r, quiet(), file / "sub", "csv");
    FAIL() << "expected an I/O error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(file.string()), std::string::npos) << e.what();
  }
  fs::remove(file);
}

TEST(RunConfigured, Dispatch) {
  auto c = quiet();
  EXPECT_THROW(run_configured(c), ConfigError);
  c.run.case_id = 3;
  EXPECT_EQ(run_configured(c).name, "case3");
  c.run.figure = "appendix";
  EXPECT_EQ(run_configured(c).name, "appendix");
}
