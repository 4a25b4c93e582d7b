#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcesim/config.hpp"
#include "dcesim/coupling.hpp"
#include "dcesim/direct.hpp"
#include "dcesim/msa.hpp"

namespace dcesim {

/// Spectrum, drive and Fourier table resolved from a RunConfig.
struct Prepared {
  RunConfig config;
  ModeSpectrum spectrum;
  DriveProfile profile;
  FourierSeries series;
  double T_s = 0.0;
  int j_max = 0;
  Diagnostics diag;
};

Prepared prepare(const RunConfig& cfg);

struct RunOptions {
  int workers = 1;
  std::optional<ModeIndex> seed_mode;  ///< direct runs: evolve this seed only
  Exec exec = Exec::parallel;
};

struct EvolveSummary {
  ModeIndex mode;
  double epsilon = 0.0;
  double omega_tilde = 0.0;
  int harmonic = 0;
  double omega_j = 0.0;          ///< m^-1
  double omega_j_tau_e = 0.0;
  bool resonant = false;
  bool decoupled = false;
  double r_cond = 0.0;           ///< s^-1
  double rate_msa = 0.0;         ///< s^-1
  std::string status_msa;
  double rate_direct = 0.0;      ///< s^-1
  std::string status_direct;
  double max_rel_diff = 0.0;     ///< over tau in [0.5, 3] when both ran
  double t_end_s = 0.0;
  bool truncated = false;
};

struct EvolveResult {
  Prepared prep;
  ResonanceReport resonances;
  std::optional<PhotonRecord> msa;
  std::optional<PhotonRecord> direct;
  std::optional<FastTrajectory> trajectory;
  EvolveSummary summary;
  std::vector<double> t;
};

EvolveResult run_evolve(const RunConfig& cfg, const RunOptions& opt = {});

/// Sweep point values for a sweep block.
std::vector<double> sweep_values(const SweepBlock& s);

/// Copy of cfg with one sweep parameter set.
RunConfig apply_parameter(const RunConfig& cfg, const std::string& name, double value);

struct SweepRow {
  int point = 0;
  double value = 0.0;
  bool ok = false;
  std::string error;
  EvolveSummary summary;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
  double success_fraction() const;
};

/// Runs every point with up to `workers` threads; a failed point is kept
/// with its error message.
SweepResult run_sweep(const RunConfig& cfg, const RunOptions& opt = {});

// File writers; each returns the path written.
std::string write_spectrum_csv(const Prepared& p, const std::string& dir);
std::string write_resonances_csv(const Prepared& p, const ResonanceReport& r, const std::string& dir);
std::vector<std::string> write_evolve_files(const EvolveResult& r, const std::string& dir);
std::string write_sweep_csv(const RunConfig& cfg, const SweepResult& s, const std::string& dir);
std::string write_effective_config(const RunConfig& cfg, const std::string& dir);

ResonanceReport resonances_for(const Prepared& p);

}  // namespace dcesim
