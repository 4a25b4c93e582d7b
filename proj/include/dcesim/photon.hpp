#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "dcesim/spectrum.hpp"

namespace dcesim {

using cplx = std::complex<double>;

/// Slow amplitudes A_n^(s), B_n^(s) on a time grid, with
///   P_n^(s) ~ A e^{+i w~ t} + B e^{-i w~ t}.
/// Rows are the observed modes, columns the seed modes; times in metres.
struct AmplitudeState {
  std::vector<ModeEntry> modes;
  std::vector<ModeIndex> seeds;
  std::vector<double> t;
  double eps_ref = 0.0;
  /// Per time point, flattened [seed][mode].
  std::vector<std::vector<cplx>> A, B;
  bool truncated = false;
  std::string note;

  std::size_t slot(std::size_t seed, std::size_t mode) const { return seed * modes.size() + mode; }
  cplx a(std::size_t i, std::size_t seed, std::size_t mode) const { return A[i][slot(seed, mode)]; }
  cplx b(std::size_t i, std::size_t seed, std::size_t mode) const { return B[i][slot(seed, mode)]; }
  std::size_t mode_position(const ModeIndex& m) const;
};

/// A(0), B(0) for mode n seeded by itself:
///   A = (1 - w_bar/w~) / (2 sqrt(2 w_bar)),  B = (1 + w_bar/w~) / (2 sqrt(2 w_bar)).
void initial_amplitudes(const ModeEntry& n, cplx& A0, cplx& B0);

enum class GrowthStatus { growing, bounded, no_growth };

std::string to_string(GrowthStatus s);

struct GrowthFit {
  double rate = 0.0;  ///< d ln N / dt, m^-1; zero unless growing
  double raw_slope = 0.0;
  GrowthStatus status = GrowthStatus::no_growth;
};

/// Least-squares slope of ln N over the final half of the grid. N below
/// 10 eps^2 everywhere gives no_growth; a fitted rise of less than e^2 over
/// the window gives bounded. Both report rate 0.
GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& N, double eps);

struct ModeSeries {
  ModeIndex mode;
  double epsilon = 0.0;
  std::vector<double> N;
  /// sinh^2(k0^2 f_j eps t / Omega_j); empty when no resonance law applies.
  std::vector<double> N_approx;
  double predicted_rate = 0.0;  ///< r_cond, zero when not resonant
  GrowthFit fit;
};

/// <N_n(t)> = sum_s 2 w_bar_n |A_n^(s)|^2 per observed mode.
struct PhotonRecord {
  std::vector<double> t;
  std::vector<ModeSeries> modes;
  bool truncated = false;

  const ModeSeries& at(const ModeIndex& m) const;
  /// Columns t_seconds, mx, my, mz, N, N_sinh2_approx, fitted_rate.
  void write_csv(std::ostream& out) const;
};

PhotonRecord photon_number(const AmplitudeState& state);

/// Uniform grid of `intervals` + 1 points on [0, t_end].
std::vector<double> uniform_grid(double t_end, int intervals);

/// Writes x with 12 significant digits in scientific notation.
std::string fmt(double x);

}  // namespace dcesim
