// wcslab: catalog | density | integral | decide | psdo | verify-prop22
//
// Exit codes: 0 ok, 2 usage / input error, 3 computation error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wcslab/errors.hpp"
#include "wcslab/leading_order.hpp"
#include "wcslab/psdo.hpp"
#include "wcslab/report.hpp"
#include "wcslab/symbol_spec.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitComputation = 3;

using wcslab::report::ConfigError;
using ordered_json = nlohmann::ordered_json;

struct Flags {
  std::string surface;
  std::optional<double> a, b, sigma, vol, r_inf;
  std::optional<int> k;
  std::string k_range;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  std::string config;
  int grid = wcslab::psdo::kDefaultGrid;
  int depth = 6;
  int trials = 200;
  int charge = 1;
  std::string spec;
};

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

wcslab::report::RunConfig build_config(const Flags& f, bool seed_given, bool need_k) {
  wcslab::report::RunConfig cfg;
  cfg.surface = f.surface;
  if (f.a) cfg.params["a"] = *f.a;
  if (f.b) cfg.params["b"] = *f.b;
  if (f.sigma) cfg.params["sigma"] = *f.sigma;
  if (f.vol) cfg.params["vol"] = *f.vol;
  if (f.r_inf) cfg.params["r_inf"] = *f.r_inf;
  if (f.k && !f.k_range.empty()) throw ConfigError("give exactly one of --k or --k-range");
  cfg.k = f.k;
  if (!f.k_range.empty()) cfg.k_range = wcslab::report::parse_k_range(f.k_range);
  cfg.seed = f.seed;
  cfg.out = f.out;
  cfg.format = f.format;

  if (!f.config.empty()) {
    const auto file = wcslab::report::load_config(f.config);
    wcslab::report::apply_config(file, cfg);
    if (const auto run = file.find("run"); run != file.end()) {
      if (const auto s = run->second.find("seed"); s != run->second.end() && !seed_given) {
        cfg.seed = static_cast<std::uint64_t>(wcslab::report::parse_number("seed", s->second));
      }
      if (const auto fm = run->second.find("format"); fm != run->second.end() && f.format.empty()) cfg.format = fm->second;
    }
  }
  if (cfg.format.empty()) cfg.format = "json";
  if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("--format must be json or csv");
  if (need_k) (void)cfg.ks();
  return cfg;
}

int run_rows(const std::string& command, const wcslab::report::RunConfig& cfg) {
  const wcslab::KahlerSurface surface = wcslab::report::make_surface(cfg);
  const std::vector<int> ks = cfg.ks();
  if (command != "decide" && !surface.curvature_known) {
    throw wcslab::UnsupportedOperation("surface '" + surface.name + "' is bounds-only; " + command +
                                       " needs its curvature (use decide)");
  }
  const auto rows = wcslab::report::sweep(surface, ks);
  Output out(cfg.out);
  wcslab::report::write_rows(out.stream(), command, rows, cfg.format);
  return kExitOk;
}

int run_catalog(const Flags& f, const wcslab::report::RunConfig& cfg) {
  if (cfg.format != "json") throw ConfigError("catalog output is json only");
  ordered_json doc;
  if (f.surface.empty()) {
    doc = wcslab::report::default_catalog();
  } else {
    doc["schema_version"] = wcslab::report::kSchemaVersion;
    doc["surfaces"] = ordered_json::array({wcslab::report::catalog_entry(wcslab::report::make_surface(cfg))});
  }
  Output out(cfg.out);
  out.stream() << doc.dump(2) << '\n';
  return kExitOk;
}

ordered_json complex_json(std::complex<double> z) {
  ordered_json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

int run_psdo(const Flags& f, const wcslab::report::RunConfig& cfg) {
  namespace ps = wcslab::psdo;
  if (cfg.format != "json") throw ConfigError("psdo output is json only");
  if (!ps::valid_grid(f.grid)) throw ConfigError("--grid must be a power of two >= 16");
  if (f.depth < 2 || f.depth > 32) throw ConfigError("--depth must be in 2..32");
  if (f.trials < 1) throw ConfigError("--trials must be >= 1");

  ps::ClassicalSymbol symbol = [&] {
    try {
      return ps::load_symbol_spec(f.spec);
    } catch (const wcslab::ParseError& e) {
      throw ConfigError(f.spec + ":" + e.what());
    } catch (const wcslab::StructuralError& e) {
      throw ConfigError(f.spec + ": " + e.what());
    } catch (const wcslab::Error& e) {
      throw ConfigError(e.what());
    }
  }();

  ordered_json doc;
  doc["schema_version"] = wcslab::report::kSchemaVersion;
  doc["spec"] = f.spec;
  doc["order"] = ps::to_string(symbol.order());
  doc["depth"] = symbol.depth();
  doc["finite"] = symbol.finite();
  doc["residue"] = complex_json(ps::wodzicki_residue(symbol));

  ordered_json comm;
  comm["seed"] = cfg.seed;
  comm["trials"] = f.trials;
  comm["depth"] = f.depth;
  comm["max_abs_residue"] = ps::commutator_trace_test(cfg.seed, f.trials, f.depth, 2, f.grid);
  doc["commutator_test"] = comm;

  // Parametrix of 1 + Delta for a seeded connection matrix in the spec's fiber dimension.
  std::mt19937_64 rng(cfg.seed);
  const ps::ClassicalSymbol gamma = ps::random_symbol(rng, ps::Degree(0), 1, symbol.fiber_dim(), f.grid, 2);
  const auto& gamma_field = gamma.components().front().plus;
  const ps::ClassicalSymbol parametrix = ps::resolvent_parametrix(gamma_field, f.depth);
  doc["parametrix_defect"] = ps::parametrix_defect(parametrix, gamma_field);

  Output out(cfg.out);
  out.stream() << doc.dump(2) << '\n';
  return kExitOk;
}

int run_verify_leading_identity(const Flags& f, const wcslab::report::RunConfig& cfg) {
  namespace lo = wcslab::leading_order;
  if (cfg.format != "json") throw ConfigError("verify-prop22 output is json only");
  if (f.grid < 16) throw ConfigError("--grid must be >= 16");
  const lo::MappedFamily family(f.grid);
  const lo::LineBundleCurvature bundle{f.charge};
  const lo::IdentityReport r = lo::verify_leading_identity(family, bundle);

  double lo_rhs = std::numeric_limits<double>::infinity();
  double hi_rhs = -lo_rhs;
  for (int i = 0; i < 8; ++i) {
    const double v = lo::basepoint_side(family, bundle, i * f.grid / 8);
    lo_rhs = std::min(lo_rhs, v);
    hi_rhs = std::max(hi_rhs, v);
  }

  ordered_json doc;
  doc["schema_version"] = wcslab::report::kSchemaVersion;
  doc["charge"] = r.charge;
  doc["grid"] = r.grid;
  doc["lhs"] = r.lhs;
  doc["rhs"] = r.rhs;
  doc["relative_error"] = r.relative_error;
  doc["basepoint_spread"] = hi_rhs - lo_rhs;
  doc["tolerance"] = lo::kIdentityTolerance;
  doc["passes"] = r.passes;
  Output out(cfg.out);
  out.stream() << doc.dump(2) << '\n';
  return r.passes ? kExitOk : kExitComputation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wodzicki-Chern-Simons invariants of circle bundles over Kahler surfaces"};
  app.fallthrough();
  app.require_subcommand(1);

  Flags f;
  app.add_option("--surface", f.surface, "t4 | cp2 | cp1xcp1 | generic");
  app.add_option("--a", f.a, "cp1xcp1: first Kahler class coefficient");
  app.add_option("--b", f.b, "cp1xcp1: second Kahler class coefficient");
  app.add_option("--sigma", f.sigma, "generic: signature");
  app.add_option("--vol", f.vol, "generic: volume");
  app.add_option("--r-inf", f.r_inf, "generic: curvature bound |R|_inf");
  app.add_option("--k", f.k, "bundle level");
  app.add_option("--k-range", f.k_range, "bundle levels LO..HI");
  auto* seed_opt = app.add_option("--seed", f.seed, "random seed")->envname("WCSLAB_SEED");
  app.add_option("--out", f.out, "output path (default stdout)");
  app.add_option("--format", f.format, "json | csv");
  app.add_option("--config", f.config, "key=value config file with [run] and per-surface sections");
  app.add_option("--grid", f.grid, "grid size")->capture_default_str();
  app.add_option("--depth", f.depth, "symbol expansion depth")->capture_default_str();
  app.add_option("--trials", f.trials, "random trials for the commutator test")->capture_default_str();

  app.add_subcommand("catalog", "list catalog surfaces");
  app.add_subcommand("density", "WCS density by both routes");
  app.add_subcommand("integral", "exact WCS integral");
  app.add_subcommand("decide", "infinite-order verdict for the fiber rotation loop");
  auto* psdo_cmd = app.add_subcommand("psdo", "residue, trace property and parametrix of a symbol spec");
  psdo_cmd->add_option("spec", f.spec, "symbol spec file")->required();
  auto* prop_cmd = app.add_subcommand("verify-prop22", "leading-order Chern class identity on the rotation family");
  prop_cmd->add_option("--charge", f.charge, "line bundle charge")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const bool rows = command == "density" || command == "integral" || command == "decide";
    const auto cfg = build_config(f, seed_opt->count() > 0, rows);
    if (rows) return run_rows(command, cfg);
    if (command == "catalog") return run_catalog(f, cfg);
    if (command == "psdo") return run_psdo(f, cfg);
    return run_verify_leading_identity(f, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "wcslab " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "wcslab " << command << ": " << e.what() << '\n';
    return kExitComputation;
  }
}
