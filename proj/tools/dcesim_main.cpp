// dcesim: spectrum | resonances | evolve | sweep
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dcesim/runner.hpp"

using namespace dcesim;

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

struct Flags {
  std::string config;
  std::string out;
  int workers = 0;
  std::string seed_mode;
};

RunConfig load(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.out.empty()) cfg.output.directory = f.out;
  return cfg;
}

RunOptions options(const Flags& f) {
  RunOptions o;
  o.workers = 1;
  if (const char* env = std::getenv("DCESIM_WORKERS")) {
    try {
      o.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError("DCESIM_WORKERS must be an integer");
    }
  }
  if (f.workers > 0) o.workers = f.workers;
  if (o.workers < 1) throw ConfigError("worker count must be >= 1");
  if (!f.seed_mode.empty()) {
    try {
      o.seed_mode = ModeIndex::parse(f.seed_mode);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--seed-mode: ") + e.what());
    }
  }
  return o;
}

void print_warnings(const Diagnostics& d) {
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_spectrum(const Flags& f) {
  const auto cfg = load(f);
  const auto p = prepare(cfg);
  print_warnings(p.diag);
  std::cout << write_spectrum_csv(p, cfg.output.directory) << '\n';
  return 0;
}

int cmd_resonances(const Flags& f) {
  const auto cfg = load(f);
  const auto p = prepare(cfg);
  print_warnings(p.diag);
  const auto rep = resonances_for(p);
  std::cout << write_resonances_csv(p, rep, cfg.output.directory) << '\n';
  return 0;
}

int cmd_evolve(const Flags& f) {
  const auto cfg = load(f);
  const auto res = run_evolve(cfg, options(f));
  print_warnings(res.prep.diag);
  for (const auto& path : write_evolve_files(res, cfg.output.directory)) std::cout << path << '\n';
  std::cout << write_effective_config(cfg, cfg.output.directory) << '\n';
  return 0;
}

int cmd_sweep(const Flags& f) {
  const auto cfg = load(f);
  if (!cfg.sweep) throw ConfigError("sweep: the configuration has no sweep block");
  const auto res = run_sweep(cfg, options(f));
  std::cout << write_sweep_csv(cfg, res, cfg.output.directory) << '\n';
  std::cout << write_effective_config(cfg, cfg.output.directory) << '\n';
  int failed = 0;
  for (const auto& r : res.rows)
    if (!r.ok) {
      ++failed;
      std::cerr << "point " << r.point << " failed: " << r.error << '\n';
    }
  if (res.success_fraction() < 0.9) {
    std::cerr << failed << " of " << res.rows.size() << " sweep points failed\n";
    return kNumericalExit;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonant photon creation in a cavity with a time-dependent conducting film"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration (defaults when omitted)");
    sub->add_option("--out", flags.out, "output directory, overrides output.directory");
    sub->add_option("--workers", flags.workers, "worker threads (env DCESIM_WORKERS)");
    sub->add_option("--seed-mode", flags.seed_mode, "direct runs: evolve only this seed, \"mx,my,mz\"");
  };
  auto* spectrum = app.add_subcommand("spectrum", "write the mode table");
  auto* resonances = app.add_subcommand("resonances", "scan drive harmonics for resonances");
  auto* evolve = app.add_subcommand("evolve", "evolve photon numbers");
  auto* sweep = app.add_subcommand("sweep", "evolve over a parameter range");
  for (auto* s : {spectrum, resonances, evolve, sweep}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(flags);
    if (resonances->parsed()) return cmd_resonances(flags);
    if (evolve->parsed()) return cmd_evolve(flags);
    if (sweep->parsed()) return cmd_sweep(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalExit;
  }
  return 0;
}
