#include "dcesim/msa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dcesim/units.hpp"

namespace dcesim {

namespace {

void check_grid(const std::vector<double>& t) {
  if (t.empty() || t.front() != 0.0) throw PreconditionError("time grid must start at t = 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw PreconditionError("time grid must increase strictly");
}

void check_harmonic(const FourierSeries& drive, int j) {
  if (j < 1 || j > drive.j_max())
    throw PreconditionError("harmonic " + std::to_string(j) + " is not retained by the drive");
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Dense complex matrix, row-major.
struct Mat {
  int n = 0;
  std::vector<cplx> v;
  explicit Mat(int n_) : n(n_), v(static_cast<std::size_t>(n_ * n_)) {}
  cplx& operator()(int r, int c) { return v[static_cast<std::size_t>(r * n + c)]; }
  cplx operator()(int r, int c) const { return v[static_cast<std::size_t>(r * n + c)]; }
  double gershgorin() const {
    double g = 0.0;
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += std::abs((*this)(r, c));
      g = std::max(g, s);
    }
    return g;
  }
};

// Y' = M Y for an n x cols block stored column-major per seed.
void apply(const Mat& M, const std::vector<cplx>& y, std::vector<cplx>& out, int cols) {
  const int n = M.n;
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) {
        const cplx m = M(r, k);
        if (m != cplx(0.0)) s += m * y[static_cast<std::size_t>(c * n + k)];
      }
      out[static_cast<std::size_t>(c * n + r)] = s;
    }
}

void rk4_linear(const Mat& M, std::vector<cplx>& y, int cols, double h, int steps) {
  const std::size_t sz = y.size();
  std::vector<cplx> k1(sz), k2(sz), k3(sz), k4(sz), tmp(sz);
  for (int s = 0; s < steps; ++s) {
    apply(M, y, k1, cols);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    apply(M, tmp, k2, cols);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    apply(M, tmp, k3, cols);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + h * k3[i];
    apply(M, tmp, k4, cols);
    for (std::size_t i = 0; i < sz; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

// Modes of one transverse class, ordered by mx.
std::vector<std::vector<std::size_t>> transverse_classes(const ModeSpectrum& sp) {
  std::vector<std::vector<std::size_t>> classes;
  const auto& cut = sp.cut();
  for (int my = 1; my <= cut.ny; ++my)
    for (int mz = 1; mz <= cut.nz; ++mz) {
      std::vector<std::size_t> c;
      for (int mx = 1; mx <= cut.nx; ++mx) c.push_back(sp.index_of({mx, my, mz}));
      classes.push_back(std::move(c));
    }
  return classes;
}

struct ClassSystem {
  Mat M;
  int parametric = 0, coupling = 0;
};

// Slow-flow matrix in t units for variables [A_0..A_{n-1}, B_0..B_{n-1}].
ClassSystem class_matrix(const ModeSpectrum& sp, const CouplingTable* table,
                         const FourierSeries& drive, const std::vector<std::size_t>& cls,
                         const MsaOptions& opt) {
  const int nc = static_cast<int>(cls.size());
  ClassSystem sys{Mat(2 * nc)};
  const cplx I(0.0, 1.0);
  const double W = drive.omega();
  for (int a = 0; a < nc; ++a) {
    const ModeEntry& n = sp.psi()[cls[a]];
    for (const auto& h : drive.harmonics()) {
      if (h.amplitude == 0.0) continue;
      const double Wj = h.j * W;
      const cplx ep = std::polar(1.0, h.phase), em = std::conj(ep);
      if (std::abs(2.0 * n.omega_tilde - Wj) < opt.tol.for_mode(n)) {
        const double g = n.epsilon * n.k0 * n.k0 * h.amplitude / (2.0 * n.omega_tilde);
        sys.M(a, nc + a) += I * g * ep;
        sys.M(nc + a, a) += -I * g * em;
        ++sys.parametric;
      }
      if (!table) continue;
      for (int b = 0; b < nc; ++b) {
        const ModeEntry& m = sp.psi()[cls[b]];
        const double gA = table->gA(m.index.mx, n.index.mx);
        if (gA == 0.0) continue;
        const double t = opt.tol.for_pair(n, m);
        const cplx common = -I * h.amplitude * m.epsilon * Wj * gA * m.k0 / (2.0 * n.omega_tilde);
        const double wn = n.omega_tilde, wm = m.omega_tilde;
        if (std::abs(wn - wm - Wj) < t) {
          const double w = -0.5 * Wj - wm;
          sys.M(a, b) += -common * w * ep;
          sys.M(nc + a, nc + b) += common * w * em;
          ++sys.coupling;
        }
        if (std::abs(wn - wm + Wj) < t) {
          const double w = -0.5 * Wj + wm;
          sys.M(a, b) += -common * w * em;
          sys.M(nc + a, nc + b) += common * w * ep;
          ++sys.coupling;
        }
        if (std::abs(wn + wm - Wj) < t) {
          const double w = -0.5 * Wj + wm;
          sys.M(a, nc + b) += -common * w * ep;
          sys.M(nc + a, b) += common * w * em;
          ++sys.coupling;
        }
      }
    }
  }
  return sys;
}

}  // namespace

MsaRun msa_parametric(const ModeSpectrum& spectrum, const FourierSeries& drive, const ModeIndex& n,
                      int j, const std::vector<double>& t, const MsaOptions& opt) {
  check_grid(t);
  check_harmonic(drive, j);
  const ModeEntry& e = spectrum.at(n);
  const auto rep = scan_resonances(spectrum, drive.omega(), drive.j_max(), opt.tol);
  const ResonanceHit* hit = nullptr;
  for (const auto& h : rep.hits)
    if (h.kind == HitKind::parametric && h.n == n && h.j == j) hit = &h;
  if (!hit) {
    const double mis = std::abs(j * drive.omega() - 2.0 * e.omega_tilde);
    throw PreconditionError("parametric condition j*Omega = 2*w~ fails for mode " + n.str() +
                            ", j = " + std::to_string(j) + ": mismatch " + num(mis) +
                            " >= tol " + num(opt.tol.for_mode(e)));
  }
  if (!hit->decoupled)
    throw PreconditionError("intermode exclusion fails for mode " + n.str() +
                            ": another mode of its transverse class is linked by a drive harmonic");

  MsaRun run;
  const double Wj = j * drive.omega();
  const double fj = drive.amplitude(j);
  const cplx ec = std::polar(1.0, drive.phase(j));
  const cplx I(0.0, 1.0);
  run.kappa = e.k0 * e.k0 * fj / Wj;
  run.r_cond = 2.0 * run.kappa * e.epsilon;

  auto& st = run.state;
  st.modes = {e};
  st.seeds = {n};
  st.eps_ref = e.epsilon;
  cplx A0, B0;
  initial_amplitudes(e, A0, B0);
  std::vector<double> approx;
  for (double ti : t) {
    const double x = run.kappa * e.epsilon * ti;
    if (x > opt.max_exponent) {
      st.truncated = true;
      st.note = "cosh argument exceeds " + num(opt.max_exponent);
      break;
    }
    const double c = std::cosh(x), s = std::sinh(x);
    st.t.push_back(ti);
    st.A.push_back({A0 * c + I * ec * B0 * s});
    st.B.push_back({B0 * c - I * std::conj(ec) * A0 * s});
    approx.push_back(s * s);
  }
  run.photons = photon_number(st);
  run.photons.modes[0].N_approx = std::move(approx);
  run.photons.modes[0].predicted_rate = run.r_cond;
  return run;
}

ChannelCount msa_channels(const ModeSpectrum& spectrum, const CouplingTable& table,
                          const FourierSeries& drive, const MsaOptions& opt) {
  ChannelCount cc;
  for (const auto& cls : transverse_classes(spectrum)) {
    const auto sys = class_matrix(spectrum, &table, drive, cls, opt);
    cc.parametric += sys.parametric;
    cc.coupling += sys.coupling;
  }
  return cc;
}

AmplitudeState msa_general(const ModeSpectrum& spectrum, const CouplingTable& table,
                           const FourierSeries& drive, const std::vector<double>& t,
                           const MsaOptions& opt) {
  check_grid(t);
  if (table.nx() != spectrum.cut().nx)
    throw PreconditionError("coupling table does not match the spectrum's mode cut");
  AmplitudeState st;
  st.modes = spectrum.psi();
  for (const auto& m : st.modes) st.seeds.push_back(m.index);
  st.eps_ref = 0.0;
  for (const auto& m : st.modes) st.eps_ref = std::max(st.eps_ref, m.epsilon);
  const std::size_t nm = st.modes.size();
  st.t = t;
  st.A.assign(t.size(), std::vector<cplx>(nm * nm));
  st.B.assign(t.size(), std::vector<cplx>(nm * nm));

  std::size_t valid = t.size();
  for (const auto& cls : transverse_classes(spectrum)) {
    const int nc = static_cast<int>(cls.size());
    const auto sys = class_matrix(spectrum, &table, drive, cls, opt);
    const double rho = sys.M.gershgorin();
    const double h_max = rho > 0.0 ? 0.01 / rho : 0.0;

    // Column c holds seed cls[c]: A in rows 0..nc-1, B in rows nc..2nc-1.
    std::vector<cplx> y(static_cast<std::size_t>(2 * nc * nc));
    for (int c = 0; c < nc; ++c) {
      cplx A0, B0;
      initial_amplitudes(spectrum.psi()[cls[c]], A0, B0);
      y[static_cast<std::size_t>(c * 2 * nc + c)] = A0;
      y[static_cast<std::size_t>(c * 2 * nc + nc + c)] = B0;
    }
    double log0 = 0.0;
    for (const auto& v : y) log0 = std::max(log0, std::abs(v));
    log0 = std::log(log0);

    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i > 0 && rho > 0.0) {
        const double span = t[i] - t[i - 1];
        const int steps = std::max(1, static_cast<int>(std::ceil(span / h_max)));
        rk4_linear(sys.M, y, nc, span / steps, steps);
      }
      double big = 0.0;
      for (const auto& v : y) big = std::max(big, std::abs(v));
      if (!std::isfinite(big) || std::log(big) - log0 > opt.max_exponent) {
        valid = std::min(valid, i);
        break;
      }
      for (int c = 0; c < nc; ++c)
        for (int r = 0; r < nc; ++r) {
          const std::size_t slot = st.slot(cls[c], cls[r]);
          st.A[i][slot] = y[static_cast<std::size_t>(c * 2 * nc + r)];
          st.B[i][slot] = y[static_cast<std::size_t>(c * 2 * nc + nc + r)];
        }
    }
  }
  if (valid < t.size()) {
    st.truncated = true;
    st.note = "amplitude growth exceeds e^" + num(opt.max_exponent);
    st.t.resize(valid);
    st.A.resize(valid);
    st.B.resize(valid);
  }
  return st;
}

double detuned_growth_rate(double eps, double kd, double delta) {
  const double g = eps * kd, d = 0.5 * delta;
  return g * g > d * d ? 2.0 * std::sqrt(g * g - d * d) : 0.0;
}

MsaRun detuned_parametric(const ModeSpectrum& spectrum, const FourierSeries& drive,
                          const ModeIndex& n, int j, double delta, const std::vector<double>& t,
                          const MsaOptions& opt) {
  check_grid(t);
  check_harmonic(drive, j);
  const ModeEntry& e = spectrum.at(n);
  const double Wj = 2.0 * e.omega_tilde + delta;
  if (!(Wj > 0.0)) throw PreconditionError("detuned harmonic frequency must stay positive");
  if (std::abs(delta) / Wj > 10.0 * e.epsilon * (1.0 + 1e-12))
    throw PreconditionError("detuning |delta|/Omega_j = " + num(std::abs(delta) / Wj) +
                            " exceeds 10*eps = " + num(10.0 * e.epsilon) +
                            "; the slow flow does not apply");
  const double fj = drive.amplitude(j);
  const double kd = e.k0 * e.k0 * fj / (2.0 * e.omega_tilde);
  const cplx ec = std::polar(1.0, drive.phase(j));
  const cplx I(0.0, 1.0);
  const double g = e.epsilon * kd;

  MsaRun run;
  run.kappa = e.k0 * e.k0 * fj / Wj;
  run.r_cond = detuned_growth_rate(e.epsilon, kd, delta);
  auto& st = run.state;
  st.modes = {e};
  st.seeds = {n};
  st.eps_ref = e.epsilon;
  cplx A, B;
  initial_amplitudes(e, A, B);

  auto rhs = [&](double tt, cplx a, cplx b, cplx& da, cplx& db) {
    const cplx ph = std::polar(1.0, delta * tt);
    da = I * g * ec * ph * b;
    db = -I * g * std::conj(ec) * std::conj(ph) * a;
  };
  double h_max = std::numeric_limits<double>::infinity();
  if (g > 0.0) h_max = 0.01 / g;
  if (delta != 0.0) h_max = std::min(h_max, 2.0 * units::kPi / (40.0 * std::abs(delta)));
  const double log0 = std::log(std::abs(B));

  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && std::isfinite(h_max)) {
      const double span = t[i] - t[i - 1];
      const int steps = std::max(1, static_cast<int>(std::ceil(span / h_max)));
      const double h = span / steps;
      double tt = t[i - 1];
      for (int s = 0; s < steps; ++s) {
        cplx a1, b1, a2, b2, a3, b3, a4, b4;
        rhs(tt, A, B, a1, b1);
        rhs(tt + 0.5 * h, A + 0.5 * h * a1, B + 0.5 * h * b1, a2, b2);
        rhs(tt + 0.5 * h, A + 0.5 * h * a2, B + 0.5 * h * b2, a3, b3);
        rhs(tt + h, A + h * a3, B + h * b3, a4, b4);
        A += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        B += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        tt = t[i - 1] + (s + 1) * h;
      }
    }
    if (std::log(std::max(std::abs(A), std::abs(B))) - log0 > opt.max_exponent) {
      st.truncated = true;
      st.note = "amplitude growth exceeds e^" + num(opt.max_exponent);
      break;
    }
    st.t.push_back(t[i]);
    st.A.push_back({A});
    st.B.push_back({B});
  }
  run.photons = photon_number(st);
  run.photons.modes[0].predicted_rate = run.r_cond;
  return run;
}

double rate_ratio(double eps_n, double T, double eps_mov, double T_mov) {
  if (!(eps_n > 0.0) || !(T > 0.0) || !(eps_mov > 0.0) || !(T_mov > 0.0))
    throw PreconditionError("rate_ratio needs positive inputs");
  return (eps_n / eps_mov) * (T_mov / T);
}

}  // namespace dcesim
