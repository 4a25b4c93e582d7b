#include "dcesim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>

#include "dcesim/units.hpp"

namespace dcesim {

using units::kPi;

double longitudinal_factor(FieldKind kind, double k, double Lx, double x) {
  const double norm = std::sqrt(2.0 / Lx);
  const bool first = x <= 0.5 * Lx;
  const double s = first ? x : x - Lx;
  switch (kind) {
    case FieldKind::Phi: return norm * std::sin(k * s);
    case FieldKind::Psi: return (first ? norm : -norm) * std::sin(k * s);
    case FieldKind::dPsi_dk: return (first ? norm : -norm) * s * std::cos(k * s);
    case FieldKind::d2Psi_dk2: return (first ? -norm : norm) * s * s * std::sin(k * s);
  }
  return 0.0;
}

namespace {

bool odd_about_midplane(FieldKind k) { return k == FieldKind::Phi; }

}  // namespace

double longitudinal_overlap(FieldKind a, double ka, FieldKind b, double kb, double Lx,
                            Reduction reduction, const QuadratureOptions& opt) {
  if (!(Lx > 0.0)) throw DomainError("Lx must be positive");
  auto integrand = [&](double x) {
    return longitudinal_factor(a, ka, Lx, x) * longitudinal_factor(b, kb, Lx, x);
  };
  const double half = 0.5 * Lx;
  if (reduction == Reduction::half) {
    if (odd_about_midplane(a) != odd_about_midplane(b)) return 0.0;
    return 2.0 * integrate(integrand, 0.0, half, opt).value;
  }
  // The factors change form at the film, so each half is its own panel set.
  return integrate(integrand, 0.0, half, opt).value + integrate(integrand, half, Lx, opt).value;
}

double mode_wavenumber(FieldKind kind, int mx, double V, double Lx) {
  if (kind == FieldKind::Phi) return 2.0 * kPi * mx / Lx;
  return solve_k(V, Lx, mx);
}

double inner_product(FieldKind kind_a, const ModeIndex& mode_a, FieldKind kind_b,
                     const ModeIndex& mode_b, const CavityConfig& cfg, double V,
                     Reduction reduction) {
  mode_a.validate();
  mode_b.validate();
  if (kind_b == FieldKind::dPsi_dk || kind_b == FieldKind::d2Psi_dk2)
    throw PreconditionError("second argument of inner_product must be Phi or Psi");
  if (!mode_a.same_transverse(mode_b)) return 0.0;
  const double ka = mode_wavenumber(kind_a, mode_a.mx, V, cfg.Lx);
  const double kb = mode_wavenumber(kind_b, mode_b.mx, V, cfg.Lx);
  return longitudinal_overlap(kind_a, ka, kind_b, kb, cfg.Lx, reduction);
}

double psi_norm(double k, double Lx) { return 1.0 - std::sin(k * Lx) / (k * Lx); }

CouplingTable::CouplingTable(int nx, std::vector<double> gA, std::vector<double> gB,
                             std::vector<double> norm)
    : nx_(nx), gA_(std::move(gA)), gB_(std::move(gB)), norm_(std::move(norm)) {}

double CouplingTable::gA(const ModeIndex& m, const ModeIndex& n) const {
  return m.same_transverse(n) ? gA(m.mx, n.mx) : 0.0;
}

double CouplingTable::gB(const ModeIndex& m, const ModeIndex& n) const {
  return m.same_transverse(n) ? gB(m.mx, n.mx) : 0.0;
}

CouplingTable coupling_coeffs(const ModeSpectrum& spectrum, Exec exec) {
  const int nx = spectrum.cut().nx;
  const double Lx = spectrum.cavity().Lx;
  const int stride = spectrum.cut().ny * spectrum.cut().nz;
  std::vector<double> k(nx), norm(nx);
  for (int m = 0; m < nx; ++m) {
    k[m] = spectrum.psi()[static_cast<std::size_t>(m * stride)].k0;
    norm[m] = psi_norm(k[m], Lx);
  }
  const int pairs = nx * nx;
  std::vector<double> gA(pairs), gB(pairs);
  auto fill = [&](int p) {
    const int m = p / nx, n = p % nx;
    gA[p] = longitudinal_overlap(FieldKind::dPsi_dk, k[m], FieldKind::Psi, k[n], Lx) / norm[n];
    gB[p] = longitudinal_overlap(FieldKind::d2Psi_dk2, k[m], FieldKind::Psi, k[n], Lx) / norm[n];
  };

  if (exec == Exec::serial) {
    for (int p = 0; p < pairs; ++p) fill(p);
  } else {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < pairs; ++p) {
      try {
        fill(p);
      } catch (...) {
#pragma omp critical(dcesim_coupling_err)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  }
  return CouplingTable(nx, std::move(gA), std::move(gB), std::move(norm));
}

std::string to_string(HitKind k) {
  switch (k) {
    case HitKind::parametric: return "parametric";
    case HitKind::coupling_difference: return "coupling_difference";
    case HitKind::coupling_sum: return "coupling_sum";
  }
  return "?";
}

double MatchTolerance::for_mode(const ModeEntry& e) const {
  if (fixed >= 0.0) return fixed;
  return scale * e.epsilon * e.omega_tilde;
}

double MatchTolerance::for_pair(const ModeEntry& a, const ModeEntry& b) const {
  return std::max(for_mode(a), for_mode(b));
}

std::vector<ResonanceHit> ResonanceReport::parametric() const {
  std::vector<ResonanceHit> out;
  for (const auto& h : hits)
    if (h.kind == HitKind::parametric) out.push_back(h);
  return out;
}

const ResonanceHit* ResonanceReport::parametric_for(const ModeIndex& n) const {
  const ResonanceHit* best = nullptr;
  for (const auto& h : hits)
    if (h.kind == HitKind::parametric && h.n == n && (!best || h.mismatch < best->mismatch))
      best = &h;
  return best;
}

void ResonanceReport::write_csv(std::ostream& out) const {
  out << "kind,j,n_x,n_y,n_z,m_x,m_y,m_z,mismatch,tol,decoupled\n";
  char buf[64];
  for (const auto& h : hits) {
    out << to_string(h.kind) << ',' << h.j << ',' << h.n.mx << ',' << h.n.my << ',' << h.n.mz
        << ',' << h.m.mx << ',' << h.m.my << ',' << h.m.mz << ',';
    std::snprintf(buf, sizeof buf, "%.11e,%.11e,", h.mismatch, h.tol);
    out << buf << (h.kind == HitKind::parametric ? (h.decoupled ? "1" : "0") : "") << '\n';
  }
}

ResonanceReport scan_resonances(const ModeSpectrum& spectrum, double omega, int j_max,
                                const MatchTolerance& tol) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("drive frequency must be positive");
  if (j_max < 0) throw DomainError("j_max must be >= 0");
  if (!std::isfinite(tol.fixed) || !std::isfinite(tol.scale) || tol.scale < 0.0)
    throw DomainError("resonance tolerance must be finite");

  ResonanceReport rep;
  rep.omega = omega;
  rep.j_max = j_max;
  const auto& modes = spectrum.psi();

  // Smallest |j' Omega - target| over j' = 1..j_max.
  auto nearest = [&](double target, int& j_best) {
    int j = static_cast<int>(std::lround(target / omega));
    j = std::clamp(j, 1, std::max(j_max, 1));
    j_best = j;
    return std::abs(j * omega - target);
  };

  auto linked = [&](std::size_t a) {
    for (std::size_t b = 0; b < modes.size(); ++b) {
      if (b == a || !modes[a].index.same_transverse(modes[b].index)) continue;
      const double t = tol.for_pair(modes[a], modes[b]);
      int jj = 0;
      const double wa = modes[a].omega_tilde, wb = modes[b].omega_tilde;
      if (nearest(std::abs(wa - wb), jj) < t) return true;
      if (nearest(wa + wb, jj) < t) return true;
    }
    return false;
  };

  if (j_max == 0) return rep;
  for (std::size_t a = 0; a < modes.size(); ++a) {
    const double t = tol.for_mode(modes[a]);
    const double target = 2.0 * modes[a].omega_tilde;
    const int j_lo = std::max(1, static_cast<int>(std::floor((target - t) / omega)));
    const int j_hi = std::min(j_max, static_cast<int>(std::ceil((target + t) / omega)));
    for (int j = j_lo; j <= j_hi; ++j) {
      const double mis = std::abs(j * omega - target);
      if (mis < t) {
        ResonanceHit h{HitKind::parametric, j, modes[a].index, modes[a].index, mis, t, false};
        h.decoupled = !linked(a);
        rep.hits.push_back(h);
      }
    }
  }
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = a + 1; b < modes.size(); ++b) {
      if (!modes[a].index.same_transverse(modes[b].index)) continue;
      const double t = tol.for_pair(modes[a], modes[b]);
      const double wa = modes[a].omega_tilde, wb = modes[b].omega_tilde;
      const double targets[2] = {std::abs(wa - wb), wa + wb};
      const HitKind kinds[2] = {HitKind::coupling_difference, HitKind::coupling_sum};
      for (int c = 0; c < 2; ++c) {
        const int j_lo = std::max(1, static_cast<int>(std::floor((targets[c] - t) / omega)));
        const int j_hi = std::min(j_max, static_cast<int>(std::ceil((targets[c] + t) / omega)));
        for (int j = j_lo; j <= j_hi; ++j) {
          const double mis = std::abs(j * omega - targets[c]);
          if (mis < t) rep.hits.push_back({kinds[c], j, modes[a].index, modes[b].index, mis, t, false});
        }
      }
    }
  return rep;
}

}  // namespace dcesim
