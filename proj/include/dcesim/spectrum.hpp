#pragma once

#include <compare>
#include <string>
#include <vector>

#include "dcesim/errors.hpp"

namespace dcesim {

/// Static problem definition: cavity dimensions and the film's conductivity
/// swing. Lengths in metres, V in m^-1.
struct CavityConfig {
  double Lx = 1e-2;
  double Ly = 1e-1;
  double Lz = 1e-1;
  double V0 = 1e12;
  double Vmax = 1e16;

  bool operator==(const CavityConfig&) const = default;

  /// Throws DomainError unless all lengths are positive and 0 < V0 <= Vmax.
  void validate() const;

  /// (V0*Lx) / (Vmax/V0). The linearised spectrum needs this to be >> 1 with
  /// Vmax/V0 > 1.
  double validity_ratio() const;
  bool perturbative() const;
};

struct ModeIndex {
  int mx = 1, my = 1, mz = 1;

  auto operator<=>(const ModeIndex&) const = default;
  bool same_transverse(const ModeIndex& o) const { return my == o.my && mz == o.mz; }
  void validate() const;
  std::string str(char sep = ',') const;
  static ModeIndex parse(const std::string& text);
};

struct ModeCut {
  int nx = 5, ny = 3, nz = 3;
  bool operator==(const ModeCut&) const = default;
  void validate() const;
};

struct RootResult {
  double k = 0.0;
  double relative_residual = 0.0;
  int iterations = 0;
  /// Root sat within 1e-13 (relative) of 2m*pi/Lx and was clamped there.
  bool clamped = false;
};

// The longitudinal wavenumbers of the film-coupled (psi) modes are the roots of
//
//     2 k cot(k Lx / 2) = -V,
//
// one per branch m in [(2m-1) pi/Lx, 2m pi/Lx]. V = 0 gives the odd modes of
// the empty cavity, V -> inf the modes of two half cavities. The tan^-1 in the
// usual statement of this equation means 1/tan: an arctangent would not reach
// either limit.
//
// The solver works with d = m*pi - k*Lx/2 in [0, pi/2] and the equivalent,
// pole-free form h(d) = 2 k cos d - V sin d, so roots close to the upper
// branch end keep full relative precision.
RootResult solve_k_detail(double V, double Lx, int m);
double solve_k(double V, double Lx, int m);

/// dk/dV along a root branch, from implicit differentiation.
double dk_dV(double k, double V, double Lx);
double d2k_dV2(double k, double V, double Lx);

/// First-order relative wavenumber swing
///   eps_n = (Vmax - V0) / (Lx k0^2 + V0 (1 + V0 Lx / 4)).
/// Adds a warning to `diag` when V0*Lx <= Vmax/V0.
double epsilon_n(const CavityConfig& cfg, double k0, Diagnostics* diag = nullptr);

/// Vmax that yields a requested eps for branch `m`, keeping the other fields.
double vmax_for_epsilon(const CavityConfig& cfg, int m, double eps);

enum class Family { psi, phi };

struct ModeEntry {
  ModeIndex index;
  Family family = Family::psi;
  double k0 = 0.0;           ///< longitudinal wavenumber at V0
  double epsilon = 0.0;      ///< zero for phi modes
  double omega_bar = 0.0;    ///< frequency at V0
  double omega_tilde = 0.0;  ///< frequency from k0 (1 + eps f0)
  bool clamped = false;

  double transverse_k2() const { return omega_bar * omega_bar - k0 * k0; }
};

/// Immutable mode table. psi() holds the film-coupled modes in (mx, my, mz)
/// lexicographic order; phi() the film-node modes, which never see the drive.
class ModeSpectrum {
 public:
  ModeSpectrum() = default;
  ModeSpectrum(CavityConfig cfg, double f0, ModeCut cut, std::vector<ModeEntry> psi,
               std::vector<ModeEntry> phi);

  const CavityConfig& cavity() const { return cfg_; }
  double f0() const { return f0_; }
  const ModeCut& cut() const { return cut_; }
  const std::vector<ModeEntry>& psi() const { return psi_; }
  const std::vector<ModeEntry>& phi() const { return phi_; }

  /// Position of a psi mode in psi(); throws PreconditionError when outside the cut.
  std::size_t index_of(const ModeIndex& m) const;
  const ModeEntry& at(const ModeIndex& m) const { return psi_[index_of(m)]; }
  bool contains(const ModeIndex& m) const;
  double max_omega_tilde() const;

 private:
  CavityConfig cfg_;
  double f0_ = 0.0;
  ModeCut cut_;
  std::vector<ModeEntry> psi_;
  std::vector<ModeEntry> phi_;
};

ModeSpectrum build_spectrum(const CavityConfig& cfg, double drive_f0, const ModeCut& cut,
                            Diagnostics* diag = nullptr);

/// phi-family frequency: pi * sqrt((2mx/Lx)^2 + (my/Ly)^2 + (mz/Lz)^2).
double phi_frequency(const CavityConfig& cfg, const ModeIndex& m);

}  // namespace dcesim
