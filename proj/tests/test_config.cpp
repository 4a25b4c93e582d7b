#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dcesim/config.hpp"
#include "dcesim/runner.hpp"
#include "dcesim/units.hpp"

using namespace dcesim;
namespace fs = std::filesystem;

namespace {

int config_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_FALSE(c.sweep.has_value());
}

TEST(Config, ParsesEveryBlock) {
  const auto c = parse_config(R"({
    "cavity": {"Lx": 0.02, "Ly": 0.1, "Lz": 0.07, "V0": 1e12, "Vmax": 1e15},
    "modes": {"nx": 4, "ny": 2, "nz": 2},
    "drive": {"shape": "linear_ramp", "T": "auto", "tune_j": 2, "tau_e": 2e-12, "j_max": 10},
    "evolution": {"method": "both", "observe": "1,2,1", "tau_end": 3, "samples": 50,
                  "k_model": "exact", "include_gB": false, "detuning": 1e-7},
    "sweep": {"parameter": "tau_e", "from": 1e-13, "to": 1e-11, "steps": 5, "scale": "log"},
    "output": {"directory": "o", "prefix": "p"}
  })");
  EXPECT_EQ(c.cavity.Lx, 0.02);
  EXPECT_EQ(c.cut.nx, 4);
  EXPECT_EQ(c.drive.T_s, 0.0);
  EXPECT_EQ(c.drive.tune_j, 2);
  EXPECT_EQ(c.evolution.method, Method::both);
  EXPECT_EQ(c.evolution.observe, (ModeIndex{1, 2, 1}));
  EXPECT_EQ(c.evolution.k_model, KModel::exact);
  EXPECT_FALSE(c.evolution.include_gB);
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_TRUE(c.sweep->log);
  EXPECT_EQ(c.output.prefix, "p");
}

TEST(Config, EffectiveConfigRoundTrips) {
  RunConfig c;
  c.cavity.V0 = 3.3e11;
  c.drive.tau_e_s = 1.0 / 3.0 * 1e-12;
  c.evolution.method = Method::direct;
  c.evolution.tol = 0.125;
  c.sweep = SweepBlock{"V0", 1e10, 1e13, 4, true};
  EXPECT_EQ(parse_config(effective_config(c)), c);
  EXPECT_EQ(parse_config(effective_config(RunConfig{})), RunConfig{});
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(config_error_line("{\n  \"cavity\": {\n    \"Lx\": -1\n  }\n}"), 3);
  EXPECT_EQ(config_error_line("{\n  \"modes\": {\"nx\": 2},\n  \"bogus\": 1\n}"), 3);
  EXPECT_EQ(config_error_line("{\n  \"drive\": {\n\n    \"shape\": \"square\"\n  }\n}"), 4);
  EXPECT_EQ(config_error_line("{\n  \"cavity\": {\"Lx\": 1,,}\n}"), 2);
  EXPECT_EQ(config_error_line("{\n \"evolution\": {\n  \"observe\": \"9,1,1\"\n }\n}"), 3);
  EXPECT_GT(config_error_line("{\"cavity\": {\"V0\": 10, \"Vmax\": 1}}"), 0);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, SweepParameterNames) {
  for (const char* p : {"tau_e", "T", "V0", "Vmax", "Lx", "Ly", "Lz", "omega_j_tau_e", "detuning"})
    EXPECT_TRUE(is_sweep_parameter(p));
  EXPECT_FALSE(is_sweep_parameter("nx"));
  EXPECT_GT(config_error_line("{\"sweep\": {\"parameter\": \"nx\", \"from\": 1, \"to\": 2}}"), 0);
}

TEST(Runner, AutoTunedPeriodHitsParametricResonance) {
  RunConfig c;
  c.cavity.Lz = 0.07;
  c.cut = {3, 2, 2};
  c.drive.tune_j = 2;
  c.drive.tau_e_s = 0.2e-12;
  const auto p = prepare(c);
  const auto& e = p.spectrum.at({1, 1, 1});
  EXPECT_NEAR(2 * p.series.omega() / (2 * e.omega_tilde), 1.0, 1e-12);
  const auto rep = resonances_for(p);
  ASSERT_NE(rep.parametric_for({1, 1, 1}), nullptr);
  EXPECT_EQ(rep.parametric_for({1, 1, 1})->j, 2);
}

TEST(Runner, EvolveDefaultGrowsAtConductivityRate) {
  RunConfig c;
  c.cut = {2, 1, 1};
  c.drive.shape = DriveShape::raised_cosine;
  const auto r = run_evolve(c);
  EXPECT_TRUE(r.summary.resonant);
  EXPECT_EQ(r.summary.status_msa, "growing");
  EXPECT_NEAR(r.summary.rate_msa / r.summary.r_cond, 1.0, 0.01);
}

TEST(Runner, SweepValuesLinearAndLog) {
  const auto lin = sweep_values({"V0", 1.0, 3.0, 3, false});
  EXPECT_EQ(lin, (std::vector<double>{1.0, 2.0, 3.0}));
  const auto lg = sweep_values({"V0", 1e10, 1e13, 4, true});
  ASSERT_EQ(lg.size(), 4u);
  EXPECT_NEAR(lg[1] / 1e11, 1.0, 1e-12);
  EXPECT_EQ(sweep_values({"V0", 5.0, 9.0, 1, false}), (std::vector<double>{5.0}));
}

TEST(Runner, SweepSerialAndParallelAgree) {
  RunConfig c;
  c.cut = {2, 1, 1};
  c.drive.shape = DriveShape::raised_cosine;
  c.sweep = SweepBlock{"V0", 1e11, 1e13, 4, true};
  RunOptions one, many;
  many.workers = 4;
  const auto a = run_sweep(c, one), b = run_sweep(c, many);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].ok, b.rows[i].ok);
    EXPECT_EQ(a.rows[i].summary.rate_msa, b.rows[i].summary.rate_msa);
  }
  EXPECT_EQ(a.success_fraction(), 1.0);
}

#ifdef DCESIM_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DCESIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = fs::temp_directory_path() / "dcesim_cli_exit";
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\n  \"cavity\": {\"Lx\": -1}\n}\n";
  std::ofstream(dir / "ok.json") << "{\"modes\": {\"nx\": 2, \"ny\": 1, \"nz\": 1}}\n";
  EXPECT_EQ(run_cli("spectrum --config " + (dir / "ok.json").string() + " --out " + dir.string()), 0);
  EXPECT_EQ(run_cli("spectrum --config " + (dir / "bad.json").string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("evolve --bogus-flag"), 2);
  EXPECT_EQ(run_cli("spectrum --config /nonexistent.json"), 2);
  EXPECT_TRUE(fs::exists(dir / "dcesim_spectrum.csv"));
}

TEST(Cli, EvolveOutputIsDeterministic) {
  const fs::path out = fs::temp_directory_path() / "dcesim_det";
  const fs::path cfg = fs::temp_directory_path() / "dcesim_det.json";
  std::ofstream(cfg) << R"({"cavity": {"Lx": 4.8, "Ly": 1000, "Lz": 1000, "V0": 2.0833333333333335, "Vmax": 2.2},
    "modes": {"nx": 2, "ny": 1, "nz": 1}, "drive": {"shape": "raised_cosine"},
    "evolution": {"method": "both", "samples": 40, "tau_end": 1.0}})";
  fs::remove_all(out);
  ASSERT_EQ(run_cli("evolve --config " + cfg.string() + " --out " + out.string()), 0);
  std::map<std::string, std::string> first;
  for (const auto& f : fs::directory_iterator(out)) first[f.path().filename()] = slurp(f.path());
  fs::remove_all(out);
  ASSERT_EQ(run_cli("evolve --config " + cfg.string() + " --out " + out.string() + " --workers 3"), 0);
  EXPECT_GE(first.size(), 4u);
  for (const auto& [name, body] : first) EXPECT_EQ(slurp(out / name), body) << name;
}
#endif
