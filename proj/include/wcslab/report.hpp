#pragma once

// Run configuration, report rows and their JSON / CSV encodings for the command-line tool.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wcslab/errors.hpp"
#include "wcslab/kahler.hpp"
#include "wcslab/sasaki.hpp"
#include "wcslab/wcs.hpp"

namespace wcslab::report {

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kCsvHeader =
    "surface,k,density_closed,density_perm,route_agreement,integral,prop39_lhs,verdict,calibration_constant";

/// Bad user input: unknown surface, missing or malformed parameters. Maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// "LO..HI" with LO <= HI; either bound may be negative.
[[nodiscard]] inline std::pair<int, int> parse_k_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError("k-range must look like LO..HI, got '" + text + "'");
  const auto parse = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("k-range bound '" + s + "' is not an integer");
  };
  const int lo = parse(text.substr(0, dots));
  const int hi = parse(text.substr(dots + 2));
  if (lo > hi) throw ConfigError("k-range is empty: " + text);
  if (static_cast<long>(hi) - lo > 10000) throw ConfigError("k-range is too long: " + text);
  return {lo, hi};
}

/// key = value lines grouped under [section] headers; '#' and ';' start comments.
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

[[nodiscard]] inline ConfigSections parse_config(std::istream& in) {
  ConfigSections out;
  std::string section;
  std::string line;
  int line_no = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no, static_cast<int>(line.size()));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError("empty section name", line_no, 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no, 1);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no, 1);
    out[section][key] = trim(line.substr(eq + 1));
  }
  return out;
}

[[nodiscard]] inline ConfigSections load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

struct RunConfig {
  std::string surface;
  std::map<std::string, double> params;  // a, b, sigma, vol, r_inf
  std::optional<int> k;
  std::optional<std::pair<int, int>> k_range;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";

  /// Values of k to evaluate, in increasing order.
  [[nodiscard]] std::vector<int> ks() const {
    if (k.has_value() == k_range.has_value()) throw ConfigError("give exactly one of --k or --k-range");
    if (k) return {*k};
    std::vector<int> v;
    for (int i = k_range->first; i <= k_range->second; ++i) v.push_back(i);
    return v;
  }
};

inline const std::vector<std::string>& surface_names() {
  static const std::vector<std::string> names = {"t4", "cp2", "cp1xcp1", "generic"};
  return names;
}

inline double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' must be a number, got '" + value + "'");
}

/// Fills `cfg` from the [run] section and the section named after the surface. Values
/// already present in `cfg` (set from flags) win.
inline void apply_config(const ConfigSections& file, RunConfig& cfg) {
  if (const auto it = file.find("run"); it != file.end()) {
    for (const auto& [key, value] : it->second) {
      if (key == "surface") {
        if (cfg.surface.empty()) cfg.surface = value;
      } else if (key == "k") {
        if (!cfg.k && !cfg.k_range) cfg.k = static_cast<int>(parse_number(key, value));
      } else if (key == "k-range" || key == "k_range") {
        if (!cfg.k && !cfg.k_range) cfg.k_range = parse_k_range(value);
      } else if (key == "seed") {
        // handled by the caller, which knows whether --seed was given
      } else if (key == "format") {
        // likewise
      } else if (key == "out") {
        if (cfg.out.empty()) cfg.out = value;
      } else {
        throw ConfigError("unknown key '" + key + "' in [run]");
      }
    }
  }
  if (cfg.surface.empty()) return;
  if (const auto it = file.find(cfg.surface); it != file.end()) {
    for (const auto& [key, value] : it->second) {
      const std::string normalized = key == "r-inf" ? "r_inf" : key;
      if (!cfg.params.contains(normalized)) cfg.params[normalized] = parse_number(key, value);
    }
  }
}

namespace detail {

inline int integer_param(const RunConfig& cfg, const std::string& key) {
  const double v = cfg.params.at(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("--" + key + " must be an integer");
  return static_cast<int>(v);
}

inline void require_params(const RunConfig& cfg, const std::vector<std::string>& allowed,
                           const std::vector<std::string>& required) {
  for (const auto& [key, value] : cfg.params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("parameter '" + key + "' does not apply to surface '" + cfg.surface + "'");
    }
  }
  for (const auto& key : required) {
    if (!cfg.params.contains(key)) {
      throw ConfigError("surface '" + cfg.surface + "' needs --" + (key == "r_inf" ? std::string("r-inf") : key));
    }
  }
}

}  // namespace detail

/// Builds the surface named in `cfg`; every input problem is a ConfigError.
[[nodiscard]] inline KahlerSurface make_surface(const RunConfig& cfg) {
  const std::string& s = cfg.surface;
  if (s.empty()) throw ConfigError("--surface is required");
  try {
    if (s == "t4") {
      detail::require_params(cfg, {}, {});
      return flat_torus();
    }
    if (s == "cp2") {
      detail::require_params(cfg, {}, {});
      return cp2_fubini_study();
    }
    if (s == "cp1xcp1") {
      detail::require_params(cfg, {"a", "b"}, {"a", "b"});
      return product_cp1(detail::integer_param(cfg, "a"), detail::integer_param(cfg, "b"));
    }
    if (s == "generic") {
      detail::require_params(cfg, {"sigma", "vol", "r_inf"}, {"sigma", "vol", "r_inf"});
      return generic_bounds(detail::integer_param(cfg, "sigma"), cfg.params.at("vol"), cfg.params.at("r_inf"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown surface '" + s + "' (known: t4, cp2, cp1xcp1, generic)");
}

struct ReportRow {
  std::string surface;
  int k = 0;
  std::optional<double> density_closed;
  std::optional<double> density_perm;
  std::optional<double> route_agreement;
  std::optional<double> integral;
  double bound_lhs = 0.0;
  std::string verdict;
  double calibration_constant = 0.0;
  std::string notes;
};

/// Full row for one k. Density fields are left empty on bounds-only surfaces.
[[nodiscard]] inline ReportRow make_row(const KahlerSurface& surface, int k) {
  ReportRow row;
  row.surface = surface.name;
  row.k = k;
  row.calibration_constant = calibration_constant();
  if (surface.curvature_known) {
    const SasakiLift lift = lift_curvature(surface, k);
    const WcsDensity d = evaluate_density(lift);
    row.density_closed = d.value_closed;
    row.density_perm = d.value_permutation;
    row.route_agreement = d.route_agreement;
  }
  const Pi1Verdict v = decide_pi1(surface, k);
  row.integral = v.integral;
  row.bound_lhs = v.bound_lhs;
  row.verdict = to_string(v.verdict);
  row.notes = v.rationale;
  return row;
}

/// Rows for every k, evaluated concurrently and returned in increasing k.
[[nodiscard]] inline std::vector<ReportRow> sweep(const KahlerSurface& surface, const std::vector<int>& ks) {
  std::vector<std::future<ReportRow>> jobs;
  jobs.reserve(ks.size());
  (void)calibration_constant();  // initialise the static before fanning out
  for (int k : ks) jobs.push_back(std::async(std::launch::async, [&surface, k] { return make_row(surface, k); }));
  std::vector<ReportRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) { return a.k < b.k; });
  return rows;
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const ReportRow& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["surface"] = r.surface;
  j["k"] = r.k;
  j["density_closed"] = opt(r.density_closed);
  j["density_perm"] = opt(r.density_perm);
  j["route_agreement"] = opt(r.route_agreement);
  j["integral"] = opt(r.integral);
  j["prop39_lhs"] = r.bound_lhs;
  j["verdict"] = r.verdict;
  j["calibration_constant"] = r.calibration_constant;
  j["notes"] = r.notes;
  return j;
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const std::string& command, const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) doc["rows"].push_back(to_json(r));
  return doc;
}

[[nodiscard]] inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One CSV line in header order; empty cells for unavailable values. Notes are not exported.
[[nodiscard]] inline std::string to_csv_line(const ReportRow& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::ostringstream s;
  s << r.surface << ',' << r.k << ',' << opt(r.density_closed) << ',' << opt(r.density_perm) << ','
    << opt(r.route_agreement) << ',' << opt(r.integral) << ',' << format_number(r.bound_lhs) << ',' << r.verdict << ','
    << format_number(r.calibration_constant);
  return s.str();
}

inline void write_rows(std::ostream& out, const std::string& command, const std::vector<ReportRow>& rows,
                       const std::string& format) {
  if (format == "json") {
    out << to_json(command, rows).dump(2) << '\n';
  } else if (format == "csv") {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << to_csv_line(r) << '\n';
  } else {
    throw ConfigError("unknown format '" + format + "' (json or csv)");
  }
}

// ---------------------------------------------------------------------------
// Catalog listing
// ---------------------------------------------------------------------------

[[nodiscard]] inline nlohmann::ordered_json catalog_entry(const KahlerSurface& s) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = s.name;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.params) j["params"][k] = v;
  j["signature"] = s.signature;
  j["volume"] = s.volume;
  j["r_inf"] = s.r_inf;
  j["curvature_known"] = s.curvature_known;
  return j;
}

/// Entry for a parametrised family when no parameters were given.
[[nodiscard]] inline nlohmann::ordered_json family_entry(const std::string& name, const std::vector<std::string>& required,
                                                         bool curvature_known) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = name;
  j["params"] = nullptr;
  j["required_params"] = required;
  j["signature"] = nullptr;
  j["volume"] = nullptr;
  j["r_inf"] = nullptr;
  j["curvature_known"] = curvature_known;
  return j;
}

[[nodiscard]] inline nlohmann::ordered_json default_catalog() {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["surfaces"] = nlohmann::ordered_json::array({
      catalog_entry(flat_torus()),
      catalog_entry(cp2_fubini_study()),
      family_entry("cp1xcp1", {"a", "b"}, true),
      family_entry("generic", {"sigma", "vol", "r_inf"}, false),
  });
  return doc;
}

}  // namespace wcslab::report
