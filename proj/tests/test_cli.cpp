// Runs the built wcslab binary and checks output and exit codes.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#ifndef WCSLAB_CLI
#error "WCSLAB_CLI must point at the wcslab binary"
#endif

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " WCSLAB_CLI " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "wcslab_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, DecideTorusSweep) {
  const Result r = run("decide --surface t4 --k-range -3..3");
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["rows"].size(), 7u);
  for (const auto& row : doc["rows"]) {
    EXPECT_EQ(row["schema_version"], 1);
    EXPECT_EQ(row["verdict"], row["k"] == 0 ? "INCONCLUSIVE" : "INFINITE_ORDER");
  }
}

TEST(Cli, DecideFubiniStudyCsv) {
  const Result r = run("decide --surface cp2 --k-range -2..2 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "surface,k,density_closed,density_perm,route_agreement,integral,prop39_lhs,verdict,calibration_constant");
  EXPECT_NE(r.out.find("cp2,-2,"), std::string::npos);
  EXPECT_NE(r.out.find(",INCONCLUSIVE,"), std::string::npos);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 6u);
}

TEST(Cli, DecideGenericBoundsModeSmallK) {
  const Result r = run("decide --surface generic --sigma -16 --vol 1 --r-inf 1 --k 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["rows"][0]["verdict"], "INCONCLUSIVE");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("catalog --surface cp1xcp1").code, 2);
  EXPECT_EQ(run("catalog --surface generic --sigma 1").code, 2);
  EXPECT_EQ(run("decide --surface k3 --k 1").code, 2);
  EXPECT_EQ(run("decide --surface t4").code, 2);
  EXPECT_EQ(run("decide --surface t4 --k 1 --k-range 0..1").code, 2);
  EXPECT_EQ(run("decide --surface t4 --k 1 --format xml").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("density --surface generic --sigma -16 --vol 1 --r-inf 1 --k 1").code, 3);
  EXPECT_EQ(run("integral --surface generic --sigma -16 --vol 1 --r-inf 1 --k 1").code, 3);
  EXPECT_EQ(run("verify-prop22 --grid 8").code, 2);
}

TEST(Cli, CatalogListsFourSurfaces) {
  const Result r = run("catalog");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["surfaces"].size(), 4u);
  const Result one = run("catalog --surface cp1xcp1 --a 2 --b 3");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(nlohmann::json::parse(one.out)["surfaces"][0]["params"]["a"], 2.0);
}

TEST(Cli, DeterministicAndEnvSeed) {
  const Result a = run("density --surface cp1xcp1 --a 1 --b 2 --k-range -2..2");
  const Result b = run("density --surface cp1xcp1 --a 1 --b 2 --k-range -2..2");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);

  const auto spec = scratch("inv.sym");
  std::ofstream(spec) << "order -1\ncomponent -1 both 0 1\n";
  const Result e1 = run("psdo " + spec.string() + " --trials 5", "WCSLAB_SEED=17");
  const Result e2 = run("psdo " + spec.string() + " --trials 5 --seed 17");
  ASSERT_EQ(e1.code, 0);
  EXPECT_EQ(e1.out, e2.out);
  EXPECT_EQ(nlohmann::json::parse(e1.out)["commutator_test"]["seed"], 17);
}

TEST(Cli, PsdoResidues) {
  const auto inv = scratch("abs_inv.sym");
  std::ofstream(inv) << "order -1\ndepth 1\ncomponent -1 both 0 1\n";
  const Result r = run("psdo " + inv.string() + " --trials 200");
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["residue"]["re"].get<double>(), 2.0, 1e-10);
  EXPECT_LE(doc["commutator_test"]["max_abs_residue"].get<double>(), 1e-8);

  const auto mult = scratch("mult.sym");
  std::ofstream(mult) << "fiber_dim 2\norder 0\nfinite true\ncomponent 0 both 0 1 2 3 4\ncomponent 0 both 1 0 1:1 0 0\n";
  const Result m = run("psdo " + mult.string() + " --trials 3");
  ASSERT_EQ(m.code, 0);
  EXPECT_EQ(nlohmann::json::parse(m.out)["residue"]["re"].get<double>(), 0.0);

  const auto bad = scratch("bad.sym");
  std::ofstream(bad) << "order 0\ncomponent 0 both 0 oops\n";
  EXPECT_EQ(run("psdo " + bad.string()).code, 2);

  const auto shallow = scratch("shallow.sym");
  std::ofstream(shallow) << "order 1\ndepth 1\ncomponent 1 both 0 1\n";
  EXPECT_EQ(run("psdo " + shallow.string() + " --trials 2").code, 3);
}

TEST(Cli, VerifyLeadingIdentity) {
  const Result r = run("verify-prop22 --charge 1 --grid 64");
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["lhs"].get<double>(), 2.0 * std::numbers::pi, 1e-6);
  EXPECT_NEAR(doc["rhs"].get<double>(), 2.0 * std::numbers::pi, 1e-6);
  const auto e32 = nlohmann::json::parse(run("verify-prop22 --charge 2 --grid 32").out)["relative_error"].get<double>();
  const auto e64 = nlohmann::json::parse(run("verify-prop22 --charge 2 --grid 64").out)["relative_error"].get<double>();
  EXPECT_LE(e64, std::max(e32, 1e-14));
  const auto zero = nlohmann::json::parse(run("verify-prop22 --charge 0").out);
  EXPECT_EQ(zero["lhs"].get<double>(), 0.0);
  EXPECT_EQ(zero["rhs"].get<double>(), 0.0);
}

TEST(Cli, ConfigFileAndOutPath) {
  const auto cfg = scratch("run.cfg");
  std::ofstream(cfg) << "[run]\nsurface = cp1xcp1\nk-range = 1..2\nformat = csv\n\n[cp1xcp1]\na = 1\nb = 1\n";
  const auto out = scratch("rows.csv");
  std::filesystem::remove(out);
  ASSERT_EQ(run("decide --config " + cfg.string() + " --out " + out.string()).code, 0);
  std::ifstream in(out);
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.substr(0, 10), "surface,k,");
  EXPECT_EQ(row.rfind("cp1xcp1,1,", 0), 0u);
  // Flags override the file.
  const Result j = run("decide --config " + cfg.string() + " --format json --k-range 2..2");
  ASSERT_EQ(j.code, 0);
  EXPECT_EQ(nlohmann::json::parse(j.out)["rows"].size(), 1u);
}
