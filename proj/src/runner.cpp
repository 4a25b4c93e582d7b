#include "dcesim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcesim/units.hpp"

namespace dcesim {

namespace fs = std::filesystem;
using units::kPi;
using units::kTwoPi;

namespace {

double tuned_period_s(const ModeSpectrum& sp, const DriveBlock& d) {
  const double w = sp.at(d.tune_mode).omega_tilde;
  const double omega = 2.0 * w / d.tune_j;
  return units::length_to_seconds(kTwoPi / omega);
}

double drive_f0(const DriveBlock& d, const DriveProfile* sampled) {
  if (d.shape == DriveShape::sampled) return fourier_numeric(*sampled, 0).f0();
  return 0.5;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const std::string& dir, const std::string& name, std::string& path) {
  fs::create_directories(dir);
  path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write \"" + path + "\"");
  return out;
}

}  // namespace

Prepared prepare(const RunConfig& cfg) {
  cfg.validate();
  Prepared p;
  p.config = cfg;
  const auto& d = cfg.drive;

  std::optional<DriveProfile> table;
  if (d.shape == DriveShape::sampled) table = DriveProfile::load_csv(d.samples_csv);
  p.spectrum = build_spectrum(cfg.cavity, drive_f0(d, table ? &*table : nullptr), cfg.cut, &p.diag);

  switch (d.shape) {
    case DriveShape::sampled:
      p.profile = *table;
      p.T_s = p.profile.period_s();
      break;
    case DriveShape::raised_cosine:
      p.T_s = d.T_s > 0.0 ? d.T_s : tuned_period_s(p.spectrum, d);
      p.profile = DriveProfile::raised_cosine(p.T_s);
      break;
    case DriveShape::linear_ramp:
      p.T_s = d.T_s > 0.0 ? d.T_s : tuned_period_s(p.spectrum, d);
      if (!(d.tau_e_s < p.T_s)) {
        std::ostringstream os;
        os << "drive.tau_e: must be < T (T = " << p.T_s << " s)";
        throw ConfigError(os.str());
      }
      p.profile = DriveProfile::linear_ramp(p.T_s, d.tau_e_s);
      break;
  }

  if (d.j_max > 0) {
    p.j_max = d.j_max;
  } else if (d.shape == DriveShape::raised_cosine) {
    p.j_max = 1;
  } else {
    const double tau = std::max(p.profile.tau_e_s(), 1e-300);
    double j = std::ceil(p.T_s / tau);
    if (d.shape == DriveShape::sampled) {
      double h = 0.0;
      const auto& s = p.profile.samples();
      for (std::size_t i = 1; i < s.size(); ++i) h = std::max(h, s[i].t - s[i - 1].t);
      j = std::min(j, std::floor(p.T_s / (8.0 * h)));
    }
    p.j_max = static_cast<int>(std::clamp(j, 1.0, 1e6));
  }
  p.series = fourier_series(p.profile, p.j_max);
  if (d.smoothing > 0.0)
    p.series = smooth_kinks(p.series, units::seconds_to_length(d.smoothing * p.profile.tau_e_s()));
  return p;
}

ResonanceReport resonances_for(const Prepared& p) {
  MatchTolerance tol{p.config.evolution.tol, p.config.evolution.tol_scale};
  return scan_resonances(p.spectrum, p.series.omega(), p.j_max, tol);
}

EvolveResult run_evolve(const RunConfig& cfg, const RunOptions& opt) {
  EvolveResult res;
  res.prep = prepare(cfg);
  auto& p = res.prep;
  const auto& ev = cfg.evolution;
  const ModeEntry& e = p.spectrum.at(ev.observe);
  const MatchTolerance tol{ev.tol, ev.tol_scale};

  int j = ev.harmonic;
  if (j > p.j_max) throw ConfigError("evolution.harmonic: exceeds the retained j_max");
  if (j == 0) {
    const double jr = std::round(2.0 * e.omega_tilde / p.series.omega());
    j = static_cast<int>(std::clamp(jr, 1.0, static_cast<double>(p.j_max)));
  }

  FourierSeries drive = p.series;
  double delta = 0.0;
  if (ev.detuning != 0.0) {
    const double Wj = 2.0 * e.omega_tilde / (1.0 - ev.detuning);
    delta = ev.detuning * Wj;
    drive = p.series.with_omega(Wj / j);
  }
  res.resonances = scan_resonances(p.spectrum, drive.omega(), p.j_max, tol);

  auto& sm = res.summary;
  sm.mode = ev.observe;
  sm.epsilon = e.epsilon;
  sm.omega_tilde = e.omega_tilde;
  sm.harmonic = j;
  sm.omega_j = j * drive.omega();
  sm.omega_j_tau_e = sm.omega_j * units::seconds_to_length(p.profile.tau_e_s());
  const ResonanceHit* hit = nullptr;
  for (const auto& h : res.resonances.hits)
    if (h.kind == HitKind::parametric && h.n == ev.observe && h.j == j) hit = &h;
  sm.resonant = hit != nullptr;
  sm.decoupled = hit && hit->decoupled;

  const double fj = drive.amplitude(j);
  const double kappa = e.k0 * e.k0 * fj / sm.omega_j;
  const double kd = e.k0 * e.k0 * fj / (2.0 * e.omega_tilde);
  double r_nat = 0.0;
  if (ev.detuning != 0.0) r_nat = detuned_growth_rate(e.epsilon, kd, delta);
  else if (sm.resonant) r_nat = 2.0 * kappa * e.epsilon;
  sm.r_cond = units::rate_to_per_second(r_nat);
  if (!sm.resonant && ev.detuning == 0.0)
    p.diag.warn("mode " + ev.observe.str() + " is off resonance for harmonic " +
                std::to_string(j) + "; evolving anyway");

  double t_end;
  if (ev.t_end_s >= 0.0) t_end = units::seconds_to_length(ev.t_end_s);
  else if (ev.tau_end >= 0.0) {
    if (!(e.epsilon > 0.0)) throw ConfigError("evolution.tau_end: needs eps > 0");
    t_end = ev.tau_end / e.epsilon;
  } else if (r_nat > 0.0) t_end = ev.growth_exponent / r_nat;
  else t_end = 100.0 * kTwoPi / drive.omega();
  sm.t_end_s = units::length_to_seconds(t_end);
  res.t = t_end > 0.0 ? uniform_grid(t_end, ev.samples) : std::vector<double>{0.0};

  auto attach_law = [&](PhotonRecord& rec) {
    for (auto& s : rec.modes) {
      if (s.mode != ev.observe) continue;
      s.predicted_rate = r_nat;
      if (ev.detuning == 0.0 && sm.resonant) {
        s.N_approx.resize(rec.t.size());
        for (std::size_t i = 0; i < rec.t.size(); ++i) {
          const double x = std::min(kappa * e.epsilon * rec.t[i], 700.0);
          s.N_approx[i] = std::sinh(x) * std::sinh(x);
        }
      }
    }
  };

  const MsaOptions mopt{tol};
  if (ev.method != Method::direct) {
    if (ev.detuning != 0.0) {
      auto run = detuned_parametric(p.spectrum, drive, ev.observe, j, delta, res.t, mopt);
      res.msa = std::move(run.photons);
    } else {
      const auto table = coupling_coeffs(p.spectrum, opt.exec);
      res.msa = photon_number(msa_general(p.spectrum, table, drive, res.t, mopt));
    }
    attach_law(*res.msa);
    const auto& s = res.msa->at(ev.observe);
    sm.rate_msa = units::rate_to_per_second(s.fit.rate);
    sm.status_msa = to_string(s.fit.status);
    sm.truncated = sm.truncated || res.msa->truncated;
  }
  if (ev.method != Method::msa) {
    const auto table = coupling_coeffs(p.spectrum, opt.exec);
    DirectOptions dopt;
    dopt.t_end = t_end;
    dopt.dt = units::seconds_to_length(ev.dt_s);
    dopt.samples = ev.samples;
    dopt.k_model = ev.k_model;
    dopt.include_gB = ev.include_gB;
    dopt.audit = ev.audit;
    dopt.max_steps = ev.max_steps;
    dopt.exec = opt.exec;
    if (opt.seed_mode) {
      if (!opt.seed_mode->same_transverse(ev.observe))
        throw ConfigError("--seed-mode " + opt.seed_mode->str() +
                          " does not share the transverse class of the observed mode");
      dopt.seeds = {*opt.seed_mode};
    } else {
      for (int mx = 1; mx <= p.spectrum.cut().nx; ++mx)
        dopt.seeds.push_back({mx, ev.observe.my, ev.observe.mz});
    }
    res.trajectory = integrate_full(p.spectrum, table, drive, dopt);
    res.direct = photon_number(extract_slow(*res.trajectory, p.spectrum));
    attach_law(*res.direct);
    const auto& s = res.direct->at(ev.observe);
    sm.rate_direct = units::rate_to_per_second(s.fit.rate);
    sm.status_direct = to_string(s.fit.status);
  }
  if (res.msa && res.direct) {
    const auto& a = res.msa->at(ev.observe).N;
    const auto& b = res.direct->at(ev.observe).N;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double tau = e.epsilon * res.t[i];
      if (tau < 0.5 || tau > 3.0 || !(b[i] > 0.0)) continue;
      sm.max_rel_diff = std::max(sm.max_rel_diff, std::abs(a[i] - b[i]) / b[i]);
    }
  }
  return res;
}

std::vector<double> sweep_values(const SweepBlock& s) {
  std::vector<double> v;
  for (int i = 0; i < s.steps; ++i) {
    const double u = s.steps == 1 ? 0.0 : static_cast<double>(i) / (s.steps - 1);
    if (s.log) v.push_back(std::exp(std::log(s.from) + u * (std::log(s.to) - std::log(s.from))));
    else v.push_back(s.from + u * (s.to - s.from));
  }
  if (s.steps > 1) v.back() = s.to;
  return v;
}

RunConfig apply_parameter(const RunConfig& cfg, const std::string& name, double value) {
  RunConfig c = cfg;
  if (name == "tau_e") c.drive.tau_e_s = value;
  else if (name == "T") c.drive.T_s = value;
  else if (name == "V0") c.cavity.V0 = value;
  else if (name == "Vmax") c.cavity.Vmax = value;
  else if (name == "Lx") c.cavity.Lx = value;
  else if (name == "Ly") c.cavity.Ly = value;
  else if (name == "Lz") c.cavity.Lz = value;
  else if (name == "detuning") c.evolution.detuning = value;
  else if (name == "omega_j_tau_e") {
    // tau_e = x / Omega_j with Omega_j = j 2 pi / T.
    c.cavity.validate();
    const auto sp = build_spectrum(c.cavity, 0.5, c.cut);
    const double T = c.drive.T_s > 0.0 ? c.drive.T_s : tuned_period_s(sp, c.drive);
    const int j = c.evolution.harmonic > 0 ? c.evolution.harmonic : c.drive.tune_j;
    c.drive.tau_e_s = value * T / (kTwoPi * j);
  } else {
    throw ConfigError("sweep.parameter: unknown parameter \"" + name + "\"");
  }
  return c;
}

double SweepResult::success_fraction() const {
  if (rows.empty()) return 1.0;
  const auto ok = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok; });
  return static_cast<double>(ok) / rows.size();
}

SweepResult run_sweep(const RunConfig& cfg, const RunOptions& opt) {
  if (!cfg.sweep) throw ConfigError("sweep: block missing");
  SweepResult out;
  out.parameter = cfg.sweep->parameter;
  const auto values = sweep_values(*cfg.sweep);
  const int n = static_cast<int>(values.size());
  out.rows.resize(values.size());

  RunOptions inner = opt;
  if (opt.workers > 1) inner.exec = Exec::serial;
  auto point = [&](int i) {
    SweepRow& row = out.rows[i];
    row.point = i;
    row.value = values[i];
    try {
      const RunConfig c = apply_parameter(cfg, out.parameter, values[i]);
      row.summary = run_evolve(c, inner).summary;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  if (opt.workers <= 1) {
    for (int i = 0; i < n; ++i) point(i);
  } else {
#pragma omp parallel for num_threads(opt.workers) schedule(dynamic)
    for (int i = 0; i < n; ++i) point(i);
  }
  return out;
}

std::string write_spectrum_csv(const Prepared& p, const std::string& dir) {
  std::string path;
  auto out = open_out(dir, p.config.output.prefix + "_spectrum.csv", path);
  out << "family,mx,my,mz,k0,epsilon,omega_bar,omega_tilde,f_bar_GHz,f_tilde_GHz,clamped\n";
  auto row = [&](const ModeEntry& e, const char* fam) {
    out << fam << ',' << e.index.mx << ',' << e.index.my << ',' << e.index.mz << ',' << fmt(e.k0)
        << ',' << fmt(e.epsilon) << ',' << fmt(e.omega_bar) << ',' << fmt(e.omega_tilde) << ','
        << fmt(units::omega_to_hz(e.omega_bar) * 1e-9) << ','
        << fmt(units::omega_to_hz(e.omega_tilde) * 1e-9) << ',' << (e.clamped ? 1 : 0) << '\n';
  };
  for (const auto& e : p.spectrum.psi()) row(e, "psi");
  for (const auto& e : p.spectrum.phi()) row(e, "phi");
  return path;
}

std::string write_resonances_csv(const Prepared& p, const ResonanceReport& r, const std::string& dir) {
  std::string path;
  auto out = open_out(dir, p.config.output.prefix + "_resonances.csv", path);
  r.write_csv(out);
  return path;
}

std::vector<std::string> write_evolve_files(const EvolveResult& r, const std::string& dir) {
  std::vector<std::string> paths;
  const auto& pre = r.prep.config.output.prefix;
  const ModeIndex obs = r.prep.config.evolution.observe;
  std::string path;
  {
    auto out = open_out(dir, pre + "_photons.csv", path);
    if (r.msa && r.direct) {
      out << "t_seconds,mx,my,mz,N,N_sinh2_approx,fitted_rate,N_direct,rel_diff\n";
      for (const auto& s : r.msa->modes) {
        const ModeSeries* d = nullptr;
        for (const auto& x : r.direct->modes)
          if (x.mode == s.mode) d = &x;
        if (!d) continue;
        const std::size_t n = std::min(s.N.size(), d->N.size());
        for (std::size_t i = 0; i < n; ++i) {
          out << fmt(units::length_to_seconds(r.t[i])) << ',' << s.mode.mx << ',' << s.mode.my
              << ',' << s.mode.mz << ',' << fmt(s.N[i]) << ','
              << (s.N_approx.empty() ? std::string() : fmt(s.N_approx[i])) << ','
              << fmt(units::rate_to_per_second(s.fit.rate)) << ',' << fmt(d->N[i]) << ','
              << (d->N[i] > 0.0 ? fmt(std::abs(s.N[i] - d->N[i]) / d->N[i]) : std::string())
              << '\n';
        }
      }
    } else {
      (r.msa ? *r.msa : *r.direct).write_csv(out);
    }
    paths.push_back(path);
  }
  if (r.trajectory) {
    auto out = open_out(dir, pre + "_trajectory.csv", path);
    r.trajectory->write_csv(out, r.prep.spectrum);
    paths.push_back(path);
  }
  {
    auto out = open_out(dir, pre + "_summary.csv", path);
    const auto& s = r.summary;
    out << "mx,my,mz,epsilon,omega_tilde,harmonic,omega_j,omega_j_tau_e,resonant,decoupled,"
           "r_cond,rate_msa,status_msa,rate_direct,status_direct,max_rel_diff,t_end_seconds,"
           "truncated\n";
    out << obs.mx << ',' << obs.my << ',' << obs.mz << ',' << fmt(s.epsilon) << ','
        << fmt(s.omega_tilde) << ',' << s.harmonic << ',' << fmt(s.omega_j) << ','
        << fmt(s.omega_j_tau_e) << ',' << s.resonant << ',' << s.decoupled << ',' << fmt(s.r_cond)
        << ',' << fmt(s.rate_msa) << ',' << s.status_msa << ',' << fmt(s.rate_direct) << ','
        << s.status_direct << ',' << fmt(s.max_rel_diff) << ',' << fmt(s.t_end_s) << ','
        << s.truncated << '\n';
    paths.push_back(path);
  }
  return paths;
}

std::string write_sweep_csv(const RunConfig& cfg, const SweepResult& s, const std::string& dir) {
  std::string path;
  auto out = open_out(dir, cfg.output.prefix + "_sweep.csv", path);
  out << "point,parameter,value,status,error,epsilon,harmonic,omega_j_tau_e,resonant,decoupled,"
         "r_cond,rate_msa,status_msa,rate_direct,status_direct,max_rel_diff,t_end_seconds\n";
  for (const auto& r : s.rows) {
    out << r.point << ',' << s.parameter << ',' << fmt(r.value) << ',' << (r.ok ? "ok" : "error")
        << ',' << (r.ok ? std::string() : quoted(r.error)) << ',';
    if (r.ok) {
      const auto& m = r.summary;
      out << fmt(m.epsilon) << ',' << m.harmonic << ',' << fmt(m.omega_j_tau_e) << ','
          << m.resonant << ',' << m.decoupled << ',' << fmt(m.r_cond) << ',' << fmt(m.rate_msa)
          << ',' << m.status_msa << ',' << fmt(m.rate_direct) << ',' << m.status_direct << ','
          << fmt(m.max_rel_diff) << ',' << fmt(m.t_end_s);
    } else {
      out << ",,,,,,,,,,,";
    }
    out << '\n';
  }
  return path;
}

std::string write_effective_config(const RunConfig& cfg, const std::string& dir) {
  std::string path;
  auto out = open_out(dir, cfg.output.prefix + "_effective.json", path);
  out << effective_config(cfg);
  return path;
}

}  // namespace dcesim
