#pragma once

#include <optional>
#include <string>

#include "dcesim/direct.hpp"
#include "dcesim/drive.hpp"
#include "dcesim/spectrum.hpp"

namespace dcesim {

enum class Method { msa, direct, both };

std::string to_string(Method m);

struct DriveBlock {
  DriveShape shape = DriveShape::linear_ramp;
  double T_s = 0.0;  ///< 0: tuned so that tune_j * Omega = 2 w~ of tune_mode
  int tune_j = 1;
  ModeIndex tune_mode{1, 1, 1};
  double tau_e_s = 1e-12;
  int j_max = 0;  ///< 0: ceil(T / tau_e), limited by the sample spacing for tables
  std::string samples_csv;
  /// Box smoothing of the kinks, as a fraction of tau_e (0 = off).
  double smoothing = 0.0;

  bool operator==(const DriveBlock&) const = default;
};

struct EvolutionBlock {
  Method method = Method::msa;
  ModeIndex observe{1, 1, 1};
  int harmonic = 0;            ///< 0: the retained j closest to 2 w~ / Omega
  double t_end_s = -1.0;       ///< explicit horizon in seconds
  double tau_end = -1.0;       ///< explicit horizon in slow time eps * t
  double growth_exponent = 20.0;
  int samples = 200;
  double dt_s = 0.0;           ///< direct step in seconds, 0 = default
  double tol = -1.0;           ///< frequency-match tolerance in m^-1, < 0 = eps w~ / 10
  double tol_scale = 0.1;
  double detuning = 0.0;       ///< Delta / Omega_j for the observed mode
  KModel k_model = KModel::linear;
  bool include_gB = true;
  bool audit = false;
  double max_steps = 5e8;

  bool operator==(const EvolutionBlock&) const = default;
};

struct SweepBlock {
  std::string parameter;
  double from = 0.0, to = 0.0;
  int steps = 1;
  bool log = false;

  bool operator==(const SweepBlock&) const = default;
};

struct OutputBlock {
  std::string directory = "out";
  std::string prefix = "dcesim";

  bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
  CavityConfig cavity;
  ModeCut cut;
  DriveBlock drive;
  EvolutionBlock evolution;
  std::optional<SweepBlock> sweep;
  OutputBlock output;

  bool operator==(const RunConfig&) const = default;

  /// Range and consistency checks shared by the parser and programmatic use.
  void validate() const;
};

/// Parameters accepted by a sweep block.
bool is_sweep_parameter(const std::string& name);

/// Parses a JSON document. Errors carry the line of the offending entry.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// JSON with every field spelled out; parse_config(effective_config(c)) == c.
std::string effective_config(const RunConfig& cfg);

}  // namespace dcesim
