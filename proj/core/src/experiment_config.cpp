#include "zenophase/errors.hpp"
#include "zenophase/experiment.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace zenophase {

using nlohmann::json;

std::vector<double> default_sweep() {
  std::vector<double> s;
  for (int k = -6; k <= 6; ++k) s.push_back(8e3 * k);
  return s;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.scan.sweep_delta_hz = default_sweep();
  return c;
}

NoiseModel ExperimentConfig::noise_model() const {
  NoiseModel m;
  m.seed = noise.seed;
  if (noise.enabled) {
    m.sigma_p = noise.sigma_p;
    m.atom_number = noise.atom_number;
  }
  return m;
}

std::vector<double> ExperimentConfig::t_grid() const {
  std::vector<double> t(static_cast<std::size_t>(scan.t_points));
  const double step = (scan.t_stop_s - scan.t_start_s) / (scan.t_points - 1);
  for (int i = 0; i < scan.t_points; ++i) t[static_cast<std::size_t>(i)] = scan.t_start_s + i * step;
  t.back() = scan.t_stop_s;
  return t;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(fmt::format("{}: {}", field, what));
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) fail(field, what);
}

const std::set<std::string>& figures() {
  static const std::set<std::string> f{"2", "3", "4a", "4b", "4c", "appendix"};
  return f;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& e = environment.env;
  require(e.b_gauss >= 0.0 && std::isfinite(e.b_gauss), "environment.b_gauss", "must be >= 0");
  require(e.nu_hfs_mhz > 0.0, "environment.nu_hfs_mhz", "must be positive");
  require(e.mu_b_mhz_per_gauss > 0.0, "environment.mu_b_mhz_per_gauss", "must be positive");
  require(std::isfinite(e.g_j) && std::isfinite(e.g_i), "environment.g_j", "Lande factors must be finite");

  require(std::isfinite(drive.delta_hz), "drive.delta_hz", "must be finite");
  require(drive.rabi_hz > 0.0, "drive.rabi_hz", "must be positive");
  require(!drive.epsilon_hz || std::isfinite(*drive.epsilon_hz), "drive.epsilon_hz", "must be finite");
  require(drive.nu_rf_mhz > 0.0, "drive.nu_rf_mhz", "must be positive");
  require(drive.loops >= 1, "drive.loops", "must be >= 1");
  require(!drive.switch_rabi_hz || *drive.switch_rabi_hz > 0.0, "drive.switch_rabi_hz",
          "must be positive");
  if (drive.rf.kind == RFPulseSpec::Kind::kFinite) {
    require(drive.rf.duration_s > 0.0, "drive.rf_duration_s", "must be positive for a finite pulse");
    require(drive.rf.rabi_hz > 0.0, "drive.rf_rabi_hz", "must be positive for a finite pulse");
  }

  require(zeno.period_s > 0.0, "zeno.period_s", "must be positive");
  require(zeno.pulse_duration_s > 0.0 && zeno.pulse_duration_s <= zeno.period_s,
          "zeno.pulse_duration_s", "must be in (0, period_s]");
  require(zeno.gamma_per_s > 0.0, "zeno.gamma_per_s", "must be positive");
  require(zeno.effective_projections >= 0, "zeno.effective_projections", "must be >= 0");

  require(scan.t_start_s > 0.0, "scan.t_start_s", "must be positive");
  require(scan.t_stop_s > scan.t_start_s, "scan.t_stop_s", "must exceed t_start_s");
  require(scan.t_points >= 8, "scan.t_points", "must be >= 8");
  require(!scan.sweep_delta_hz.empty(), "scan.sweep_delta_hz", "must not be empty");

  require(noise.sigma_p >= 0.0, "noise.sigma_p", "must be >= 0");
  require(noise.atom_number >= 0, "noise.atom_number", "must be >= 0");
  require(noise.repetitions >= 1, "noise.repetitions", "must be >= 1");

  require(!run.case_id || (*run.case_id >= 1 && *run.case_id <= 4), "run.case", "must be 1, 2, 3 or 4");
  require(!run.figure || figures().count(*run.figure) == 1, "run.figure",
          "must be one of 2, 3, 4a, 4b, 4c, appendix");
  require(run.format == "csv" || run.format == "json" || run.format == "both", "run.format",
          "must be csv, json or both");
  require(run.probe_step_rad > 0.0, "run.probe_step_rad", "must be positive");
  require(!run.out_dir.empty(), "run.out_dir", "must not be empty");
}

// ---------------------------------------------------------------------------
// JSON <-> config

namespace {

class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (!root.contains(name)) return;
    const json& s = root.at(name);
    if (s.is_null()) return;
    if (!s.is_object()) fail(name_, "must be a table");
    obj_ = &s;
    for (const auto& [k, v] : s.items()) unused_.insert(k);
  }

  ~Section() noexcept(false) {
    if (!unused_.empty() && std::uncaught_exceptions() == 0) {
      fail(name_ + "." + *unused_.begin(), "unknown key");
    }
  }

  const json* get(const char* key) {
    unused_.erase(key);
    if (!obj_ || !obj_->contains(key)) return nullptr;
    const json& v = obj_->at(key);
    return v.is_null() ? nullptr : &v;
  }

  bool has(const char* key) const { return obj_ && obj_->contains(key) && !obj_->at(key).is_null(); }

  std::string field(const char* key) const { return name_ + "." + key; }

  void number(const char* key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(field(key), "must be a number");
      out = v->get<double>();
    }
  }
  void optional_number(const char* key, std::optional<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(field(key), "must be a number");
      out = v->get<double>();
    }
  }
  template <typename Int>
  void integer(const char* key, Int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(field(key), "must be an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
        } else {
          const auto s = v->get<std::int64_t>();
          if (s < 0) fail(field(key), "must be >= 0");
          out = static_cast<Int>(s);
        }
      } else {
        out = static_cast<Int>(v->get<std::int64_t>());
      }
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(field(key), "must be true or false");
      out = v->get<bool>();
    }
  }
  void string(const char* key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(field(key), "must be a string");
      out = v->get<std::string>();
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> unused_;
};

ExperimentConfig from_json(const json& root) {
  if (!root.is_object()) fail("config", "top level must be a table");
  static const std::set<std::string> known{"environment", "drive", "zeno", "scan", "noise", "run"};
  for (const auto& [k, v] : root.items()) {
    if (known.count(k) == 0) fail(k, "unknown section");
  }

  ExperimentConfig c = default_config();
  {
    Section s(root, "environment");
    s.number("b_gauss", c.environment.env.b_gauss);
    s.number("g_j", c.environment.env.g_j);
    s.number("g_i", c.environment.env.g_i);
    s.number("mu_b_mhz_per_gauss", c.environment.env.mu_b_mhz_per_gauss);
    s.number("nu_hfs_mhz", c.environment.env.nu_hfs_mhz);
    std::string mode = c.environment.mode == BreitRabiMode::kCorrected ? "corrected" : "literal";
    s.string("breit_rabi_mode", mode);
    if (mode == "corrected") {
      c.environment.mode = BreitRabiMode::kCorrected;
    } else if (mode == "literal") {
      c.environment.mode = BreitRabiMode::kLiteral;
    } else {
      fail("environment.breit_rabi_mode", "must be corrected or literal");
    }
  }
  {
    Section s(root, "drive");
    s.number("delta_hz", c.drive.delta_hz);
    s.number("rabi_hz", c.drive.rabi_hz);
    s.optional_number("epsilon_hz", c.drive.epsilon_hz);
    s.number("nu_rf_mhz", c.drive.nu_rf_mhz);
    s.integer("loops", c.drive.loops);
    s.optional_number("switch_rabi_hz", c.drive.switch_rabi_hz);
    std::string kind = c.drive.rf.kind == RFPulseSpec::Kind::kIdeal ? "ideal" : "finite";
    s.string("rf_kind", kind);
    if (kind == "ideal") {
      c.drive.rf.kind = RFPulseSpec::Kind::kIdeal;
    } else if (kind == "finite") {
      c.drive.rf.kind = RFPulseSpec::Kind::kFinite;
    } else {
      fail("drive.rf_kind", "must be ideal or finite");
    }
    s.number("rf_duration_s", c.drive.rf.duration_s);
    s.number("rf_rabi_hz", c.drive.rf.rabi_hz);
    std::string axis = c.drive.rf.axis == RFAxis::kX ? "x" : "y";
    s.string("rf_axis", axis);
    if (axis == "x") {
      c.drive.rf.axis = RFAxis::kX;
    } else if (axis == "y") {
      c.drive.rf.axis = RFAxis::kY;
    } else {
      fail("drive.rf_axis", "must be x or y");
    }
    s.number("rf_phase_rad", c.drive.rf.phase_rad);
  }
  {
    Section s(root, "zeno");
    s.boolean("enabled", c.zeno.enabled);
    s.number("period_s", c.zeno.period_s);
    s.number("pulse_duration_s", c.zeno.pulse_duration_s);
    std::string model = c.zeno.model == PulseModel::kIdeal ? "ideal" : "decay";
    s.string("model", model);
    if (model == "ideal") {
      c.zeno.model = PulseModel::kIdeal;
    } else if (model == "decay") {
      c.zeno.model = PulseModel::kDecay;
    } else {
      fail("zeno.model", "must be ideal or decay");
    }
    s.number("gamma_per_s", c.zeno.gamma_per_s);
    s.boolean("during_idle", c.zeno.during_idle);
    s.integer("effective_projections", c.zeno.effective_projections);
  }
  {
    Section s(root, "scan");
    s.number("t_start_s", c.scan.t_start_s);
    s.number("t_stop_s", c.scan.t_stop_s);
    s.integer("t_points", c.scan.t_points);
    if (const json* v = s.get("sweep_delta_hz")) {
      if (!v->is_array()) fail("scan.sweep_delta_hz", "must be an array of numbers");
      c.scan.sweep_delta_hz.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail("scan.sweep_delta_hz", "must be an array of numbers");
        c.scan.sweep_delta_hz.push_back(x.get<double>());
      }
    }
  }
  {
    Section s(root, "noise");
    s.boolean("enabled", c.noise.enabled);
    s.number("sigma_p", c.noise.sigma_p);
    s.integer("atom_number", c.noise.atom_number);
    const bool seeded = s.has("seed");
    s.integer("seed", c.noise.seed);
    s.integer("repetitions", c.noise.repetitions);
    if (c.noise.enabled && (c.noise.sigma_p > 0.0 || c.noise.atom_number > 0) && !seeded) {
      fail("noise.seed", "required when noise is enabled");
    }
  }
  {
    Section s(root, "run");
    if (const json* v = s.get("case")) {
      if (!v->is_number_integer()) fail("run.case", "must be an integer");
      c.run.case_id = v->get<int>();
    }
    if (const json* v = s.get("figure")) {
      if (v->is_string()) {
        c.run.figure = v->get<std::string>();
      } else if (v->is_number_integer()) {
        c.run.figure = std::to_string(v->get<int>());
      } else {
        fail("run.figure", "must be a string");
      }
    }
    s.string("out_dir", c.run.out_dir);
    s.string("format", c.run.format);
    s.number("probe_step_rad", c.run.probe_step_rad);
    s.boolean("figure_presets", c.run.figure_presets);
  }
  c.validate();
  return c;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const ExperimentConfig& c) {
  json j;
  const auto& e = c.environment.env;
  j["environment"] = {{"b_gauss", e.b_gauss},
                      {"g_j", e.g_j},
                      {"g_i", e.g_i},
                      {"mu_b_mhz_per_gauss", e.mu_b_mhz_per_gauss},
                      {"nu_hfs_mhz", e.nu_hfs_mhz},
                      {"breit_rabi_mode",
                       c.environment.mode == BreitRabiMode::kCorrected ? "corrected" : "literal"}};
  j["drive"] = {{"delta_hz", c.drive.delta_hz},
                {"rabi_hz", c.drive.rabi_hz},
                {"epsilon_hz", optional_json(c.drive.epsilon_hz)},
                {"nu_rf_mhz", c.drive.nu_rf_mhz},
                {"loops", c.drive.loops},
                {"switch_rabi_hz", optional_json(c.drive.switch_rabi_hz)},
                {"rf_kind", c.drive.rf.kind == RFPulseSpec::Kind::kIdeal ? "ideal" : "finite"},
                {"rf_duration_s", c.drive.rf.duration_s},
                {"rf_rabi_hz", c.drive.rf.rabi_hz},
                {"rf_axis", c.drive.rf.axis == RFAxis::kX ? "x" : "y"},
                {"rf_phase_rad", c.drive.rf.phase_rad}};
  j["zeno"] = {{"enabled", c.zeno.enabled},
               {"period_s", c.zeno.period_s},
               {"pulse_duration_s", c.zeno.pulse_duration_s},
               {"model", c.zeno.model == PulseModel::kIdeal ? "ideal" : "decay"},
               {"gamma_per_s", c.zeno.gamma_per_s},
               {"during_idle", c.zeno.during_idle},
               {"effective_projections", c.zeno.effective_projections}};
  j["scan"] = {{"t_start_s", c.scan.t_start_s},
               {"t_stop_s", c.scan.t_stop_s},
               {"t_points", c.scan.t_points},
               {"sweep_delta_hz", c.scan.sweep_delta_hz}};
  j["noise"] = {{"enabled", c.noise.enabled},
                {"sigma_p", c.noise.sigma_p},
                {"atom_number", c.noise.atom_number},
                {"seed", c.noise.seed},
                {"repetitions", c.noise.repetitions}};
  j["run"] = {{"case", c.run.case_id ? json(*c.run.case_id) : json(nullptr)},
              {"figure", c.run.figure ? json(*c.run.figure) : json(nullptr)},
              {"out_dir", c.run.out_dir},
              {"format", c.run.format},
              {"probe_step_rad", c.run.probe_step_rad},
              {"figure_presets", c.run.figure_presets}};
  return j;
}

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json j = json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (const auto* a = node.as_array()) {
    json j = json::array();
    for (const auto& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (const auto* v = node.as_integer()) return json(v->get());
  if (const auto* v = node.as_floating_point()) return json(v->get());
  if (const auto* v = node.as_boolean()) return json(v->get());
  if (const auto* v = node.as_string()) return json(v->get());
  throw ConfigError("config: dates and times are not supported");
}

}  // namespace

ExperimentConfig parse_config_toml(std::string_view text, std::string_view source) {
  toml::table table;
  try {
    table = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
  return from_json(toml_to_json(table));
}

ExperimentConfig parse_config_json(std::string_view text, std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  if (j.is_object() && j.contains("config") && j.at("config").is_object()) {
    return from_json(j.at("config"));
  }
  return from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.extension() == ".json") return parse_config_json(text, path.string());
  return parse_config_toml(text, path.string());
}

std::string config_json(const ExperimentConfig& config) { return to_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
  const std::string body = config_json(config);
  std::string blob = fmt::format("blob {}", body.size());
  blob.push_back('\0');
  blob += body;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("config_hash: SHA-1 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace zenophase
