#pragma once

#include <iosfwd>
#include <vector>

#include "dcesim/exec.hpp"
#include "dcesim/quadrature.hpp"
#include "dcesim/spectrum.hpp"

namespace dcesim {

/// Extended mode functions over [0, Lx]. Phi has a node at the film, Psi is
/// the film-coupled family, and the last two are its k-derivatives.
enum class FieldKind { Phi, Psi, dPsi_dk, d2Psi_dk2 };

/// half: parity reduction to 2 * integral over [0, Lx/2] (or zero for mixed
/// parity). full: quadrature over both halves.
enum class Reduction { half, full };

/// Longitudinal factor of `kind` at x, including the sqrt(2/Lx) normalisation.
double longitudinal_factor(FieldKind kind, double k, double Lx, double x);

/// integral_0^Lx of factor_a(k_a) * factor_b(k_b) dx with k treated as a free
/// parameter (it need not be a root). Throws QuadratureNotConverged.
double longitudinal_overlap(FieldKind a, double ka, FieldKind b, double kb, double Lx,
                            Reduction reduction = Reduction::half,
                            const QuadratureOptions& opt = {});

/// Longitudinal wavenumber of a mode of the given family at conductivity V.
double mode_wavenumber(FieldKind kind, int mx, double V, double Lx);

/// (kind_a mode_a, kind_b mode_b) at conductivity V: the longitudinal overlap
/// times the transverse Kronecker deltas.
double inner_product(FieldKind kind_a, const ModeIndex& mode_a, FieldKind kind_b,
                     const ModeIndex& mode_b, const CavityConfig& cfg, double V,
                     Reduction reduction = Reduction::half);

/// (Psi_m, Psi_m) = 1 - sin(k Lx) / (k Lx).
double psi_norm(double k, double Lx);

/// gA_mn = (dPsi_m/dk, Psi_n) / (Psi_n, Psi_n) and gB_mn likewise with the
/// second derivative, at V0. Both vanish unless m and n share (my, mz), so the
/// table stores the nx x nx longitudinal part.
class CouplingTable {
 public:
  CouplingTable() = default;
  CouplingTable(int nx, std::vector<double> gA, std::vector<double> gB, std::vector<double> norm);

  int nx() const { return nx_; }
  double gA(int mx, int nx_index) const { return gA_[idx(mx, nx_index)]; }
  double gB(int mx, int nx_index) const { return gB_[idx(mx, nx_index)]; }
  double gA(const ModeIndex& m, const ModeIndex& n) const;
  double gB(const ModeIndex& m, const ModeIndex& n) const;
  /// N_m for branch mx.
  double norm(int mx) const { return norm_[static_cast<std::size_t>(mx - 1)]; }

  bool operator==(const CouplingTable&) const = default;

 private:
  std::size_t idx(int m, int n) const {
    return static_cast<std::size_t>((m - 1) * nx_ + (n - 1));
  }
  int nx_ = 0;
  std::vector<double> gA_, gB_, norm_;
};

CouplingTable coupling_coeffs(const ModeSpectrum& spectrum, Exec exec = Exec::parallel);

enum class HitKind { parametric, coupling_difference, coupling_sum };

std::string to_string(HitKind k);

struct ResonanceHit {
  HitKind kind = HitKind::parametric;
  int j = 0;
  ModeIndex n;
  ModeIndex m;             ///< equals n for parametric hits
  double mismatch = 0.0;   ///< |j Omega - 2 w_n| or |j Omega - |w_n -+ w_m||
  double tol = 0.0;
  /// Parametric hits only: no other mode of the same transverse class is
  /// linked to n by any retained harmonic.
  bool decoupled = false;
};

struct ResonanceReport {
  double omega = 0.0;
  int j_max = 0;
  std::vector<ResonanceHit> hits;

  std::vector<ResonanceHit> parametric() const;
  /// The parametric hit on mode n with the smallest mismatch, or nullptr.
  const ResonanceHit* parametric_for(const ModeIndex& n) const;
  void write_csv(std::ostream& out) const;
};

/// Tolerance policy for frequency matching: a fixed value, or eps_n w_n / 10
/// per mode (the larger of the two for pairs) when `fixed` is negative.
struct MatchTolerance {
  double fixed = -1.0;
  double scale = 0.1;
  double for_mode(const ModeEntry& e) const;
  double for_pair(const ModeEntry& a, const ModeEntry& b) const;
};

/// All parametric (j Omega = 2 w_n) and coupling (j Omega = |w_n -+ w_m|)
/// matches for j = 1..j_max. Coupling pairs are reported only within a
/// transverse class, where gA and gB can be non-zero.
ResonanceReport scan_resonances(const ModeSpectrum& spectrum, double omega, int j_max,
                                const MatchTolerance& tol = {});

}  // namespace dcesim
