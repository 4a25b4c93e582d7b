#pragma once

#include <vector>

#include "dcesim/coupling.hpp"
#include "dcesim/drive.hpp"
#include "dcesim/photon.hpp"

namespace dcesim {

struct MsaOptions {
  MatchTolerance tol;
  /// Overflow guard on the cosh argument (and on log |amplitude| growth).
  double max_exponent = 700.0;
};

struct MsaRun {
  AmplitudeState state;
  PhotonRecord photons;
  double kappa = 0.0;   ///< growth constant in tau = eps t: k0^2 f_j / Omega_j
  double r_cond = 0.0;  ///< photon growth rate 2 k0^2 f_j eps / Omega_j (m^-1)
};

/// Decoupled parametric resonance 2 w~_n = j Omega, solved in closed form:
///   A = A0 cosh(kappa tau) + i e^{i c_j} B0 sinh(kappa tau),
///   B = B0 cosh(kappa tau) - i e^{-i c_j} A0 sinh(kappa tau).
/// Throws PreconditionError unless the scan confirms the match and the
/// absence of intermode links.
MsaRun msa_parametric(const ModeSpectrum& spectrum, const FourierSeries& drive, const ModeIndex& n,
                      int j, const std::vector<double>& t, const MsaOptions& opt = {});

/// Coupled slow flow over every retained mode and seed: the parametric channel
/// plus the three intermode channels, each switched on when its frequency
/// match holds within tolerance. Fixed-step RK4 in t with the step capped at
/// 0.01 over a Gershgorin bound of the system matrix.
AmplitudeState msa_general(const ModeSpectrum& spectrum, const CouplingTable& table,
                           const FourierSeries& drive, const std::vector<double>& t,
                           const MsaOptions& opt = {});

struct ChannelCount {
  int parametric = 0;
  int coupling = 0;
};

/// Number of active channels msa_general would switch on.
ChannelCount msa_channels(const ModeSpectrum& spectrum, const CouplingTable& table,
                          const FourierSeries& drive, const MsaOptions& opt = {});

/// Parametric channel with harmonic j re-tuned to Omega_j = 2 w~_n + delta,
/// keeping e^{+-i delta t} in the slow flow. Requires |delta| / Omega_j <= 10 eps_n.
MsaRun detuned_parametric(const ModeSpectrum& spectrum, const FourierSeries& drive,
                          const ModeIndex& n, int j, double delta, const std::vector<double>& t,
                          const MsaOptions& opt = {});

/// Photon growth rate of the detuned channel, 2 Re sqrt((eps kd)^2 - (delta/2)^2)
/// with kd = k0^2 f_j / (2 w~).
double detuned_growth_rate(double eps, double kd, double delta);

/// r_cond / r_mov ~ (eps_n / eps_mov) (T_mov / T).
double rate_ratio(double eps_n, double T, double eps_mov, double T_mov);

}  // namespace dcesim
