#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dcesim/spectrum.hpp"

namespace dcesim {

/// One retained harmonic of f: amplitude * cos(j * Omega * t + phase), with
/// amplitude >= 0 and phase in (-pi, pi].
struct Harmonic {
  int j = 1;
  double amplitude = 0.0;
  double phase = 0.0;
};

struct DriveDerivatives {
  double f = 0.0, df = 0.0, d2f = 0.0;
};

/// Truncated Fourier series f0 + sum_j f_j cos(j Omega t + c_j) in natural
/// time units (t in metres, Omega in m^-1). Derivatives are those of the
/// partial sum, which stay finite where the profile itself has kinks.
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(double omega, double f0, std::vector<Harmonic> harmonics);

  double omega() const { return omega_; }
  double period() const;
  double f0() const { return f0_; }
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }
  int j_max() const;

  /// Zero when harmonic j is not retained.
  double amplitude(int j) const;
  double phase(int j) const;

  DriveDerivatives eval(double t) const;
  double value(double t) const { return eval(t).f; }

  /// Keeps f0 and harmonic j only.
  FourierSeries only(int j) const;
  /// Same coefficients, different fundamental.
  FourierSeries with_omega(double omega) const;

  /// f0^2 + (1/2) sum f_j^2, the mean square of the partial sum.
  double parseval_sum() const;

 private:
  double omega_ = 1.0;
  double f0_ = 0.0;
  std::vector<Harmonic> harmonics_;
};

enum class DriveShape { linear_ramp, raised_cosine, sampled };

std::string to_string(DriveShape s);
DriveShape parse_drive_shape(const std::string& s);

struct DriveSample {
  double t = 0.0;  ///< seconds
  double f = 0.0;
};

/// Periodic excitation-relaxation profile f(t) over one period T (seconds).
///   linear_ramp:   t/tau_e rising, (T - t)/(T - tau_e) relaxing.
///   raised_cosine: (1 - cos(2 pi t / T)) / 2, a single harmonic peaking at T/2.
///   sampled:       linear interpolation of a table covering one period.
class DriveProfile {
 public:
  static DriveProfile linear_ramp(double period_s, double tau_e_s);
  static DriveProfile raised_cosine(double period_s);
  static DriveProfile sampled(std::vector<DriveSample> samples);
  /// Two-column CSV (t_seconds, f) with a header row.
  static DriveProfile read_csv(std::istream& in);
  static DriveProfile load_csv(const std::string& path);

  DriveShape shape() const { return shape_; }
  double period_s() const { return period_s_; }
  double tau_e_s() const { return tau_e_s_; }
  const std::vector<DriveSample>& samples() const { return samples_; }

  /// Piecewise-linear nodes over [0, T] for ramp and sampled shapes.
  std::vector<DriveSample> linear_nodes() const;
  double mean_square() const;

 private:
  DriveShape shape_ = DriveShape::linear_ramp;
  double period_s_ = 1.0;
  double tau_e_s_ = 0.5;
  std::vector<DriveSample> samples_;  ///< sampled shape only, shifted to start at t = 0
};

/// f(t) with periodic extension, t in seconds.
double eval_f(const DriveProfile& profile, double t_s);

/// Closed-form ramp coefficients: f0 = 1/2,
///   l_j = T (cos(2 pi j r) - 1) / (2 pi^2 j^2 tau_e (1 - r)),
///   h_j = T sin(2 pi j r) / (2 pi^2 j^2 tau_e (1 - r)),   r = tau_e / T,
/// f_j = sqrt(l_j^2 + h_j^2) and c_j from l_j = f_j cos c_j, h_j = -f_j sin c_j.
FourierSeries fourier_ramp(double period_s, double tau_e_s, int j_max);

/// Fourier coefficients by exact integration of the piecewise-linear
/// interpolant against cos/sin on every interval (Filon-type trapezoid rule).
/// For sampled tables, requires at least 8 samples per period of harmonic
/// j_max and throws ResolutionError otherwise.
FourierSeries fourier_numeric(const DriveProfile& profile, int j_max);

/// Closed form for ramp and raised-cosine shapes, numeric for sampled ones.
FourierSeries fourier_series(const DriveProfile& profile, int j_max);

/// Box-window smoothing of width w (natural time units): f_j *= sinc(j Omega w / 2).
/// Convolving a piecewise-linear profile with a box makes it C^1.
FourierSeries smooth_kinks(const FourierSeries& series, double width);

/// mean(f^2) - parseval_sum(). Non-negative up to rounding; equals half the
/// squared amplitude of the dropped harmonics.
double parseval_defect(const DriveProfile& profile, const FourierSeries& series);

/// Upper bound on parseval_defect for a table truncated at j_max, from the
/// slope jumps (and value jump, for an unclosed sampled table) of the profile.
double parseval_tail_bound(const DriveProfile& profile, int j_max);

struct ConductivityState {
  double V = 0.0;
  std::vector<double> k_linear;  ///< per branch mx = 1..nx: k0 (1 + eps f)
  std::vector<double> k_exact;   ///< filled when requested: root at V(t)
};

/// V(t) = V0 + (Vmax - V0) f(t) and the branch wavenumbers at time t (seconds).
ConductivityState conductivity_at(const ModeSpectrum& spectrum, const DriveProfile& profile,
                                  double t_s, bool with_exact = false);

}  // namespace dcesim
