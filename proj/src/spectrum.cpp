#include "dcesim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dcesim/units.hpp"

namespace dcesim {

using units::kPi;

void CavityConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(Lx) || !positive(Ly) || !positive(Lz))
    throw DomainError("cavity lengths must be positive and finite");
  if (!positive(V0)) throw DomainError("V0 must be positive and finite");
  if (!std::isfinite(Vmax) || Vmax < V0) throw DomainError("Vmax must be finite and >= V0");
}

double CavityConfig::validity_ratio() const { return (V0 * Lx) / (Vmax / V0); }

bool CavityConfig::perturbative() const { return V0 * Lx > Vmax / V0; }

void ModeIndex::validate() const {
  if (mx < 1 || my < 1 || mz < 1) throw DomainError("mode indices must be >= 1, got " + str());
}

std::string ModeIndex::str(char sep) const {
  std::ostringstream os;
  os << mx << sep << my << sep << mz;
  return os.str();
}

ModeIndex ModeIndex::parse(const std::string& text) {
  ModeIndex m;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> m.mx >> c1 >> m.my >> c2 >> m.mz) || c1 != ',' || c2 != ',')
    throw DomainError("mode must be written as \"mx,my,mz\", got \"" + text + "\"");
  is >> std::ws;
  if (!is.eof()) throw DomainError("trailing characters in mode \"" + text + "\"");
  m.validate();
  return m;
}

void ModeCut::validate() const {
  if (nx < 1 || ny < 1 || nz < 1) throw DomainError("mode cut must be >= 1 in every direction");
}

RootResult solve_k_detail(double V, double Lx, int m) {
  if (!(V >= 0.0)) throw DomainError("conductivity potential V must be >= 0");
  if (!(Lx > 0.0) || !std::isfinite(Lx)) throw DomainError("Lx must be positive");
  if (m < 1) throw DomainError("branch index m must be >= 1");

  const double mpi = m * kPi;
  const double k_end = 2.0 * mpi / Lx;
  if (V == 0.0) return {(2 * m - 1) * kPi / Lx, 0.0, 0, false};

  // Root of h(d) = 2 k(d) cos d - V sin d with k(d) = 2 (m pi - d) / Lx.
  // h(0) = 2 k_end > 0 and h(pi/2) = -V < 0; h is strictly decreasing.
  auto k_of = [&](double d) { return 2.0 * (mpi - d) / Lx; };
  auto h = [&](double d) { return 2.0 * k_of(d) * std::cos(d) - V * std::sin(d); };
  auto dh = [&](double d) {
    return -4.0 / Lx * std::cos(d) - 2.0 * k_of(d) * std::sin(d) - V * std::cos(d);
  };

  // atan(2 k_end / V) bounds the root from above and is already close to it.
  double d = std::isinf(V) ? 0.0 : std::atan(2.0 * k_end / V);
  if (d < 1e-13 * mpi) return {k_end, 0.0, 0, true};

  double lo = 0.0, hi = 0.5 * kPi;
  constexpr int kMaxIter = 400;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  int it = 0;
  for (; it < kMaxIter; ++it) {
    const double hv = h(d);
    if (hv == 0.0) break;
    (hv > 0.0 ? lo : hi) = d;
    double next = d - hv / dh(d);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - d);
    d = next;
    if (step <= 4.0 * kEps * d || hi - lo <= 4.0 * kEps * d) break;
  }

  const double k = k_of(d);
  const double residual = std::abs(h(d)) / (std::sin(d) * (V + 2.0 * k));
  const double k_lo = k_of(hi), k_hi = k_of(lo);
  if (it == kMaxIter && (k_hi - k_lo > 1e-12 * k || residual > 1e-8))
    throw RootNotConverged(k_lo, k_hi, residual, it);
  if (residual > 1e-8) throw RootNotConverged(k_lo, k_hi, residual, it);
  if (d < 1e-13 * mpi) return {k_end, residual, it, true};
  return {k, residual, it, false};
}

double solve_k(double V, double Lx, int m) { return solve_k_detail(V, Lx, m).k; }

double dk_dV(double k, double V, double Lx) {
  return k / (V + k * k * Lx + 0.25 * V * V * Lx);
}

double d2k_dV2(double k, double V, double Lx) {
  const double D = V + k * k * Lx + 0.25 * V * V * Lx;
  const double k1 = k / D;
  const double dD = 1.0 + 2.0 * k * Lx * k1 + 0.5 * V * Lx;
  return (k1 * D - k * dD) / (D * D);
}

double epsilon_n(const CavityConfig& cfg, double k0, Diagnostics* diag) {
  if (!(k0 > 0.0)) throw DomainError("epsilon_n needs k0 > 0");
  cfg.validate();
  if (diag && !cfg.perturbative()) {
    std::ostringstream os;
    os << "linearised spectrum outside its validity range: V0*Lx = " << cfg.V0 * cfg.Lx
       << " is not >> Vmax/V0 = " << cfg.Vmax / cfg.V0;
    diag->warn(os.str());
  }
  const double denom = cfg.Lx * k0 * k0 + cfg.V0 * (1.0 + 0.25 * cfg.V0 * cfg.Lx);
  return (cfg.Vmax - cfg.V0) / denom;
}

double vmax_for_epsilon(const CavityConfig& cfg, int m, double eps) {
  if (!(eps >= 0.0)) throw DomainError("target epsilon must be >= 0");
  const double k0 = solve_k(cfg.V0, cfg.Lx, m);
  return cfg.V0 + eps * (cfg.Lx * k0 * k0 + cfg.V0 * (1.0 + 0.25 * cfg.V0 * cfg.Lx));
}

double phi_frequency(const CavityConfig& cfg, const ModeIndex& m) {
  const double a = 2.0 * m.mx / cfg.Lx, b = m.my / cfg.Ly, c = m.mz / cfg.Lz;
  return kPi * std::sqrt(a * a + b * b + c * c);
}

ModeSpectrum::ModeSpectrum(CavityConfig cfg, double f0, ModeCut cut, std::vector<ModeEntry> psi,
                           std::vector<ModeEntry> phi)
    : cfg_(cfg), f0_(f0), cut_(cut), psi_(std::move(psi)), phi_(std::move(phi)) {}

bool ModeSpectrum::contains(const ModeIndex& m) const {
  return m.mx >= 1 && m.my >= 1 && m.mz >= 1 && m.mx <= cut_.nx && m.my <= cut_.ny &&
         m.mz <= cut_.nz;
}

std::size_t ModeSpectrum::index_of(const ModeIndex& m) const {
  if (!contains(m)) throw PreconditionError("mode " + m.str() + " is outside the mode cut");
  return static_cast<std::size_t>(((m.mx - 1) * cut_.ny + (m.my - 1)) * cut_.nz + (m.mz - 1));
}

double ModeSpectrum::max_omega_tilde() const {
  double w = 0.0;
  for (const auto& e : psi_) w = std::max(w, e.omega_tilde);
  return w;
}

ModeSpectrum build_spectrum(const CavityConfig& cfg, double drive_f0, const ModeCut& cut,
                            Diagnostics* diag) {
  cfg.validate();
  cut.validate();
  if (!std::isfinite(drive_f0) || drive_f0 < 0.0) throw DomainError("drive f0 must be >= 0");

  std::vector<double> k0(cut.nx), eps(cut.nx);
  std::vector<bool> clamped(cut.nx);
  for (int mx = 1; mx <= cut.nx; ++mx) {
    const auto r = solve_k_detail(cfg.V0, cfg.Lx, mx);
    k0[mx - 1] = r.k;
    clamped[mx - 1] = r.clamped;
    eps[mx - 1] = epsilon_n(cfg, r.k, mx == 1 ? diag : nullptr);
  }

  std::vector<ModeEntry> psi, phi;
  psi.reserve(static_cast<std::size_t>(cut.nx * cut.ny * cut.nz));
  for (int mx = 1; mx <= cut.nx; ++mx)
    for (int my = 1; my <= cut.ny; ++my)
      for (int mz = 1; mz <= cut.nz; ++mz) {
        const double ky = kPi * my / cfg.Ly, kz = kPi * mz / cfg.Lz;
        const double kt2 = ky * ky + kz * kz;
        const double k = k0[mx - 1], e = eps[mx - 1];
        const double kt = k * (1.0 + e * drive_f0);
        ModeEntry psi_mode;
        psi_mode.index = {mx, my, mz};
        psi_mode.family = Family::psi;
        psi_mode.k0 = k;
        psi_mode.epsilon = e;
        psi_mode.omega_bar = std::sqrt(k * k + kt2);
        psi_mode.omega_tilde = std::sqrt(kt * kt + kt2);
        psi_mode.clamped = clamped[mx - 1];
        psi.push_back(psi_mode);

        ModeEntry phi_mode;
        phi_mode.index = {mx, my, mz};
        phi_mode.family = Family::phi;
        phi_mode.k0 = 2.0 * kPi * mx / cfg.Lx;
        phi_mode.omega_bar = phi_frequency(cfg, phi_mode.index);
        phi_mode.omega_tilde = phi_mode.omega_bar;
        phi.push_back(phi_mode);
      }
  return ModeSpectrum(cfg, drive_f0, cut, std::move(psi), std::move(phi));
}

}  // namespace dcesim
