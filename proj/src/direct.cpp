#include "dcesim/direct.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>

#include "dcesim/units.hpp"

namespace dcesim {

namespace {

struct Branch {
  double k0, eps, kt2;  // kt2: transverse wavenumber squared of the class
  int mx;
};

struct Kinematics {
  double k, kd, kdd;
};

class Kinematic {
 public:
  Kinematic(const ModeSpectrum& sp, const FourierSeries& drive, KModel model)
      : sp_(sp), drive_(drive), model_(model) {}

  void at(double t, const std::vector<Branch>& br, std::vector<Kinematics>& out) const {
    const auto d = drive_.eval(t);
    const auto& cfg = sp_.cavity();
    const double dV = cfg.Vmax - cfg.V0;
    for (std::size_t i = 0; i < br.size(); ++i) {
      const auto& b = br[i];
      if (model_ == KModel::linear) {
        out[i] = {b.k0 * (1.0 + b.eps * d.f), b.k0 * b.eps * d.df, b.k0 * b.eps * d.d2f};
      } else {
        const double V = std::max(0.0, cfg.V0 + dV * d.f);
        const double k = solve_k(V, cfg.Lx, b.mx);
        const double k1 = dk_dV(k, V, cfg.Lx), k2 = d2k_dV2(k, V, cfg.Lx);
        const double vd = dV * d.df;
        out[i] = {k, k1 * vd, k2 * vd * vd + k1 * dV * d.d2f};
      }
    }
  }

 private:
  const ModeSpectrum& sp_;
  const FourierSeries& drive_;
  KModel model_;
};

std::vector<std::size_t> class_of(const ModeSpectrum& sp, const ModeIndex& s) {
  std::vector<std::size_t> c;
  for (int mx = 1; mx <= sp.cut().nx; ++mx) c.push_back(sp.index_of({mx, s.my, s.mz}));
  return c;
}

SeedTrajectory run_seed(const ModeSpectrum& sp, const CouplingTable& table,
                        const FourierSeries& drive, const DirectOptions& opt,
                        const ModeIndex& seed, const std::vector<double>& t_out, int per_interval,
                        double dt) {
  SeedTrajectory tr;
  tr.seed = seed;
  tr.modes = class_of(sp, seed);
  const int n = static_cast<int>(tr.modes.size());
  std::vector<Branch> br(n);
  for (int i = 0; i < n; ++i) {
    const auto& e = sp.psi()[tr.modes[i]];
    br[i] = {e.k0, e.epsilon, e.transverse_k2(), e.index.mx};
  }
  std::vector<double> gA(n * n), gB(n * n);
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q) {
      gA[m * n + q] = table.gA(br[m].mx, br[q].mx);
      gB[m * n + q] = opt.include_gB ? table.gB(br[m].mx, br[q].mx) : 0.0;
    }

  const Kinematic kin(sp, drive, opt.k_model);
  std::vector<Kinematics> kk(n);
  // y = [P_0..P_{n-1}, Q_0..Q_{n-1}], Q = dP/dt.
  auto rhs = [&](double t, const std::vector<cplx>& y, std::vector<cplx>& dy) {
    kin.at(t, br, kk);
    for (int q = 0; q < n; ++q) {
      const double w2 = kk[q].k * kk[q].k + br[q].kt2;
      cplx acc = -w2 * y[q];
      for (int m = 0; m < n; ++m) {
        const double a = gA[m * n + q], b = gB[m * n + q];
        if (a == 0.0 && b == 0.0) continue;
        acc -= (2.0 * y[n + m] * kk[m].kd + y[m] * kk[m].kdd) * a +
               y[m] * (kk[m].kd * kk[m].kd) * b;
      }
      dy[q] = y[n + q];
      dy[n + q] = acc;
    }
  };

  std::vector<cplx> y(2 * n), k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);
  const int s = static_cast<int>(std::find(tr.modes.begin(), tr.modes.end(), sp.index_of(seed)) -
                                 tr.modes.begin());
  const double wb = sp.psi()[tr.modes[s]].omega_bar;
  y[s] = 1.0 / std::sqrt(2.0 * wb);
  y[n + s] = cplx(0.0, -std::sqrt(0.5 * wb));

  const double Lx = sp.cavity().Lx;
  auto record = [&](double t) {
    tr.P.emplace_back(y.begin(), y.begin() + n);
    tr.dP.emplace_back(y.begin() + n, y.end());
    kin.at(t, br, kk);
    double w = 0.0;
    for (int q = 0; q < n; ++q) w += psi_norm(kk[q].k, Lx) * std::imag(std::conj(y[q]) * y[n + q]);
    tr.wronskian.push_back(-2.0 * w);
  };

  record(0.0);
  for (std::size_t i = 1; i < t_out.size(); ++i) {
    const double t0 = t_out[i - 1];
    for (int st = 0; st < per_interval; ++st) {
      const double t = t0 + st * dt;
      rhs(t, y, k1);
      for (int q = 0; q < 2 * n; ++q) tmp[q] = y[q] + 0.5 * dt * k1[q];
      rhs(t + 0.5 * dt, tmp, k2);
      for (int q = 0; q < 2 * n; ++q) tmp[q] = y[q] + 0.5 * dt * k2[q];
      rhs(t + 0.5 * dt, tmp, k3);
      for (int q = 0; q < 2 * n; ++q) tmp[q] = y[q] + dt * k3[q];
      rhs(t + dt, tmp, k4);
      for (int q = 0; q < 2 * n; ++q)
        y[q] += dt / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
    }
    record(t_out[i]);
  }
  return tr;
}

FastTrajectory integrate_once(const ModeSpectrum& sp, const CouplingTable& table,
                              const FourierSeries& drive, const DirectOptions& opt) {
  if (!(opt.t_end >= 0.0) || !std::isfinite(opt.t_end)) throw DomainError("t_end must be >= 0");
  if (opt.samples < 1) throw DomainError("samples must be >= 1");
  if (!(opt.dt >= 0.0)) throw DomainError("dt must be >= 0");
  if (table.nx() != sp.cut().nx)
    throw PreconditionError("coupling table does not match the spectrum's mode cut");

  std::vector<ModeIndex> seeds = opt.seeds;
  if (seeds.empty())
    for (const auto& e : sp.psi()) seeds.push_back(e.index);
  for (const auto& s : seeds)
    if (!sp.contains(s)) throw PreconditionError("seed " + s.str() + " is outside the mode cut");

  FastTrajectory tr;
  tr.t = uniform_grid(opt.t_end, opt.samples);
  const double dt_req = opt.dt > 0.0 ? opt.dt : default_dt(sp, drive);
  int per = 0;
  if (opt.t_end > 0.0) {
    const double interval = tr.t[1] - tr.t[0];
    const double per_d = std::ceil(interval / dt_req * (1.0 - 1e-12));
    const double total = per_d * opt.samples * static_cast<double>(seeds.size());
    if (total > opt.max_steps) {
      std::ostringstream os;
      os << "direct integration needs " << total << " steps, above the budget of " << opt.max_steps
         << " (dt = " << dt_req << ", t_end = " << opt.t_end << ")";
      throw NumericalError(os.str());
    }
    per = std::max(1, static_cast<int>(per_d));
    tr.dt = interval / per;
  } else {
    tr.dt = dt_req;
  }
  tr.steps = static_cast<long long>(per) * opt.samples;
  tr.seeds.resize(seeds.size());

  const int ns = static_cast<int>(seeds.size());
  if (opt.exec == Exec::serial) {
    for (int i = 0; i < ns; ++i)
      tr.seeds[i] = run_seed(sp, table, drive, opt, seeds[i], tr.t, per, tr.dt);
  } else {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < ns; ++i) {
      try {
        tr.seeds[i] = run_seed(sp, table, drive, opt, seeds[i], tr.t, per, tr.dt);
      } catch (...) {
#pragma omp critical(dcesim_direct_err)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  }
  return tr;
}

std::vector<double> final_photons(const FastTrajectory& tr, const ModeSpectrum& sp) {
  const auto st = extract_slow(tr, sp);
  const auto rec = photon_number(st);
  std::vector<double> out;
  for (const auto& m : rec.modes) out.push_back(m.N.back());
  return out;
}

}  // namespace

double default_dt(const ModeSpectrum& spectrum, const FourierSeries& drive) {
  const double w = std::max(spectrum.max_omega_tilde(), drive.j_max() * drive.omega());
  return units::kTwoPi / (40.0 * w);
}

FastTrajectory integrate_full(const ModeSpectrum& spectrum, const CouplingTable& table,
                              const FourierSeries& drive, const DirectOptions& opt) {
  auto tr = integrate_once(spectrum, table, drive, opt);
  if (!opt.audit || opt.t_end == 0.0) return tr;

  DirectOptions fine = opt;
  fine.audit = false;
  fine.dt = 0.5 * tr.dt;
  const auto tf = integrate_once(spectrum, table, drive, fine);
  const auto a = final_photons(tr, spectrum), b = final_photons(tf, spectrum);
  double floor = 0.0;
  for (const auto& e : spectrum.psi()) floor = std::max(floor, e.epsilon * e.epsilon);
  double change = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    change = std::max(change, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), floor));
  tr.audit_change = change;
  if (change > opt.audit_tol) throw RefinementRequired(tr.dt, change);
  return tr;
}

AmplitudeState extract_slow(const FastTrajectory& traj, const ModeSpectrum& spectrum) {
  AmplitudeState st;
  st.t = traj.t;
  // Observe every mode whose class is reached by some seed.
  std::vector<bool> seen(spectrum.psi().size(), false);
  for (const auto& s : traj.seeds)
    for (auto m : s.modes) seen[m] = true;
  std::vector<std::size_t> pos(spectrum.psi().size(), 0);
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) {
      pos[i] = st.modes.size();
      st.modes.push_back(spectrum.psi()[i]);
      st.eps_ref = std::max(st.eps_ref, spectrum.psi()[i].epsilon);
    }
  for (const auto& s : traj.seeds) st.seeds.push_back(s.seed);
  const std::size_t cells = st.modes.size() * st.seeds.size();
  st.A.assign(st.t.size(), std::vector<cplx>(cells));
  st.B.assign(st.t.size(), std::vector<cplx>(cells));
  const cplx I(0.0, 1.0);
  for (std::size_t s = 0; s < traj.seeds.size(); ++s) {
    const auto& tr = traj.seeds[s];
    for (std::size_t q = 0; q < tr.modes.size(); ++q) {
      const double w = spectrum.psi()[tr.modes[q]].omega_tilde;
      const std::size_t slot = st.slot(s, pos[tr.modes[q]]);
      for (std::size_t i = 0; i < st.t.size(); ++i) {
        const cplx P = tr.P[i][q], Q = tr.dP[i][q];
        const cplx ph = std::polar(1.0, w * st.t[i]);
        st.A[i][slot] = 0.5 * (P + Q / (I * w)) * std::conj(ph);
        st.B[i][slot] = 0.5 * (P - Q / (I * w)) * ph;
      }
    }
  }
  return st;
}

void FastTrajectory::write_csv(std::ostream& out, const ModeSpectrum& spectrum) const {
  out << "t_seconds,sx,sy,sz,mx,my,mz,re_P,im_P,re_dP,im_dP,N\n";
  const cplx I(0.0, 1.0);
  for (const auto& s : seeds)
    for (std::size_t q = 0; q < s.modes.size(); ++q) {
      const auto& e = spectrum.psi()[s.modes[q]];
      for (std::size_t i = 0; i < t.size(); ++i) {
        const cplx P = s.P[i][q], Q = s.dP[i][q];
        const cplx A = 0.5 * (P + Q / (I * e.omega_tilde));
        out << fmt(units::length_to_seconds(t[i])) << ',' << s.seed.mx << ',' << s.seed.my << ','
            << s.seed.mz << ',' << e.index.mx << ',' << e.index.my << ',' << e.index.mz << ','
            << fmt(P.real()) << ',' << fmt(P.imag()) << ',' << fmt(Q.real()) << ','
            << fmt(Q.imag()) << ',' << fmt(2.0 * e.omega_bar * std::norm(A)) << '\n';
      }
    }
}

PhiModeReport phi_mode_check(const ModeSpectrum& spectrum, const FourierSeries& drive) {
  PhiModeReport rep;
  const auto& cfg = spectrum.cavity();
  const double Lx = cfg.Lx;
  double f_peak = drive.f0();
  for (const auto& h : drive.harmonics()) f_peak += h.amplitude;
  const double V_peak = cfg.V0 + (cfg.Vmax - cfg.V0) * std::max(0.0, f_peak);
  const double scale = std::sqrt(2.0 / Lx);
  for (const auto& phi : spectrum.phi()) {
    const double kphi = phi.k0;
    const double at_film = std::abs(longitudinal_factor(FieldKind::Phi, kphi, Lx, 0.5 * Lx));
    double overlap = 0.0;
    for (double V : {cfg.V0, V_peak})
      for (int mx = 1; mx <= spectrum.cut().nx; ++mx) {
        const double kpsi = solve_k(V, Lx, mx);
        overlap = std::max(overlap, std::abs(longitudinal_overlap(FieldKind::Phi, kphi, FieldKind::Psi,
                                                                  kpsi, Lx, Reduction::full)));
      }
    const bool inert = at_film <= 1e-12 * scale && overlap <= 1e-10;
    rep.modes.push_back(phi.index);
    rep.film_value.push_back(at_film);
    rep.max_overlap.push_back(overlap);
    rep.inert.push_back(inert);
    rep.all_inert = rep.all_inert && inert;
  }
  return rep;
}

}  // namespace dcesim
