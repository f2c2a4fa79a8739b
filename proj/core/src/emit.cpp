#include "zenophase/experiment.hpp"

#include "zenophase/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <system_error>

namespace zenophase {

namespace {

using nlohmann::json;

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

std::string table_csv(const Table& table) {
  std::string s;
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    if (k) s += ',';
    s += table.columns[k];
  }
  s += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) s += ',';
      s += cell_text(row[k]);
    }
    s += '\n';
  }
  return s;
}

std::string phases_csv(const std::vector<PhaseRow>& rows) {
  Table t{{"delta_hz", "rabi_hz", "case", "phi_rad", "phi_err_rad"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.delta_hz, r.rabi_hz, static_cast<std::int64_t>(r.case_id), r.phi_rad,
                      r.phi_err_rad});
  }
  return table_csv(t);
}

std::string report_json(const Report& report, const ExperimentConfig& config) {
  json doc;
  doc["name"] = report.name;
  doc["config"] = json::parse(config_json(config));
  doc["config_hash"] = config_hash(config);
  json metrics = json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
  doc["metrics"] = std::move(metrics);
  json notes = json::object();
  for (const auto& [k, v] : report.notes) notes[k] = v;
  if (config.environment.mode == BreitRabiMode::kLiteral) {
    notes["breit_rabi_mode"] =
        "literal mode reproduces the quoted splitting formula, which disagrees with the "
        "exact Breit-Rabi result by a fixed offset";
  }
  doc["notes"] = std::move(notes);
  json phases = json::array();
  for (const auto& r : report.phases) {
    phases.push_back({{"delta_hz", r.delta_hz},
                      {"rabi_hz", r.rabi_hz},
                      {"case", r.case_id},
                      {"phi_rad", r.phi_rad},
                      {"phi_err_rad", r.phi_err_rad}});
  }
  doc["phases"] = std::move(phases);
  if (!report.figure.columns.empty()) doc["figure"] = table_json(report.figure);
  json tables = json::object();
  for (const auto& [k, t] : report.tables) tables[k] = table_json(t);
  doc["tables"] = std::move(tables);
  json fringes = json::array();
  for (const auto& [stem, ds] : report.fringes) fringes.push_back(stem);
  doc["fringes"] = std::move(fringes);
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit(const Report& report, const ExperimentConfig& config,
                                        const std::filesystem::path& out_dir,
                                        std::string_view format) {
  const bool csv = format == "csv" || format == "both";
  const bool js = format == "json" || format == "both";
  if (!csv && !js) throw ConfigError(fmt::format("format: expected csv, json or both, got '{}'", format));
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& file, const std::string& text) {
    const auto path = out_dir / file;
    write_file(path, text);
    written.push_back(path);
  };
  if (csv) {
    if (!report.figure.columns.empty()) put(report.name + ".csv", table_csv(report.figure));
    put(report.name + "_phases.csv", phases_csv(report.phases));
    for (const auto& [stem, ds] : report.fringes) {
      std::ostringstream s;
      write_fringes_csv(s, ds);
      put(report.name + "_fringes_" + stem + ".csv", s.str());
    }
    for (const auto& [k, t] : report.tables) put(report.name + "_" + k + ".csv", table_csv(t));
  }
  if (js) put(report.name + ".json", report_json(report, config));
  return written;
}

}  // namespace zenophase
