#pragma once

#include <iosfwd>
#include <vector>

#include "dcesim/coupling.hpp"
#include "dcesim/drive.hpp"
#include "dcesim/exec.hpp"
#include "dcesim/photon.hpp"

namespace dcesim {

/// How k_m(t) follows the drive: k0 (1 + eps f) or the root at V(t).
enum class KModel { linear, exact };

struct DirectOptions {
  double t_end = 0.0;  ///< metres
  double dt = 0.0;     ///< 0 selects default_dt
  int samples = 200;   ///< output intervals; dt is shrunk so they fall on steps
  KModel k_model = KModel::linear;
  bool include_gB = true;
  /// Seeds to evolve; empty means every psi mode. Each seed excites only its
  /// own transverse class.
  std::vector<ModeIndex> seeds;
  /// Rerun at dt/2 and require final photon numbers to agree to audit_tol.
  bool audit = false;
  double audit_tol = 0.01;
  double max_steps = 5e8;  ///< budget summed over seeds
  Exec exec = Exec::parallel;
};

struct SeedTrajectory {
  ModeIndex seed;
  std::vector<std::size_t> modes;        ///< positions in spectrum.psi()
  std::vector<std::vector<cplx>> P, dP;  ///< [time][mode]
  /// -2 sum_n N_n(k_n(t)) Im(P_n* dP_n/dt); equals N_seed at t = 0.
  std::vector<double> wronskian;
};

struct FastTrajectory {
  std::vector<double> t;
  double dt = 0.0;
  long long steps = 0;  ///< per seed
  std::vector<SeedTrajectory> seeds;
  double audit_change = 0.0;

  /// Columns t_seconds, seed, mode, Re/Im P, Re/Im dP/dt, N contribution.
  void write_csv(std::ostream& out, const ModeSpectrum& spectrum) const;
};

/// 2 pi / (40 max(w~_max, j_max Omega)).
double default_dt(const ModeSpectrum& spectrum, const FourierSeries& drive);

/// Fixed-step RK4 for
///   P_n'' + w_n(t)^2 P_n = -sum_m [(2 P_m' k_m' + P_m k_m'') gA_mn + P_m k_m'^2 gB_mn],
/// starting from P = (2 w_bar)^{-1/2}, P' = -i (w_bar/2)^{1/2} on the seed.
/// k' and k'' come from the drive's Fourier partial sum.
FastTrajectory integrate_full(const ModeSpectrum& spectrum, const CouplingTable& table,
                              const FourierSeries& drive, const DirectOptions& opt);

/// A = (P + P'/(i w~)) e^{-i w~ t} / 2, B = (P - P'/(i w~)) e^{+i w~ t} / 2.
AmplitudeState extract_slow(const FastTrajectory& traj, const ModeSpectrum& spectrum);

struct PhiModeReport {
  std::vector<ModeIndex> modes;
  std::vector<double> film_value;   ///< |Phi| at the film, x = Lx/2
  std::vector<double> max_overlap;  ///< max |(Phi_m, Psi_n)| over n at V0 and at peak V
  std::vector<bool> inert;
  bool all_inert = true;
};

/// The phi family has a node at the film, so the drive never reaches it and
/// an initially empty phi mode stays empty.
PhiModeReport phi_mode_check(const ModeSpectrum& spectrum, const FourierSeries& drive);

}  // namespace dcesim
