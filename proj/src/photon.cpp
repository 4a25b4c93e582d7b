#include "dcesim/photon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dcesim/units.hpp"

namespace dcesim {

std::size_t AmplitudeState::mode_position(const ModeIndex& m) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].index == m) return i;
  throw PreconditionError("mode " + m.str() + " is not observed in this state");
}

void initial_amplitudes(const ModeEntry& n, cplx& A0, cplx& B0) {
  const double rho = n.omega_bar / n.omega_tilde;
  const double s = 1.0 / (2.0 * std::sqrt(2.0 * n.omega_bar));
  A0 = (1.0 - rho) * s;
  B0 = (1.0 + rho) * s;
}

std::string to_string(GrowthStatus s) {
  switch (s) {
    case GrowthStatus::growing: return "growing";
    case GrowthStatus::bounded: return "bounded";
    case GrowthStatus::no_growth: return "no_growth";
  }
  return "?";
}

GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& N, double eps) {
  GrowthFit fit;
  if (t.size() != N.size()) throw PreconditionError("time and photon series differ in length");
  const double floor = 10.0 * eps * eps;
  if (t.size() < 4 || std::all_of(N.begin(), N.end(), [&](double v) { return v < floor; }))
    return fit;
  const std::size_t start = t.size() / 2;
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t n = 0;
  for (std::size_t i = start; i < t.size(); ++i) {
    if (!(N[i] > 0.0)) continue;
    const double y = std::log(N[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
    ++n;
  }
  if (n < 2) {
    fit.status = GrowthStatus::bounded;
    return fit;
  }
  const double tm = st / n;
  const double denom = stt - n * tm * tm;
  fit.raw_slope = denom > 0.0 ? (sty - tm * sy) / denom : 0.0;
  const double window = t.back() - t[start];
  if (fit.raw_slope * window >= 2.0) {
    fit.status = GrowthStatus::growing;
    fit.rate = fit.raw_slope;
  } else {
    fit.status = GrowthStatus::bounded;
  }
  return fit;
}

const ModeSeries& PhotonRecord::at(const ModeIndex& m) const {
  for (const auto& s : modes)
    if (s.mode == m) return s;
  throw PreconditionError("mode " + m.str() + " is not in the photon record");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

void PhotonRecord::write_csv(std::ostream& out) const {
  out << "t_seconds,mx,my,mz,N,N_sinh2_approx,fitted_rate\n";
  for (const auto& s : modes)
    for (std::size_t i = 0; i < t.size(); ++i) {
      out << fmt(units::length_to_seconds(t[i])) << ',' << s.mode.mx << ',' << s.mode.my << ','
          << s.mode.mz << ',' << fmt(s.N[i]) << ','
          << (s.N_approx.empty() ? std::string() : fmt(s.N_approx[i])) << ','
          << fmt(units::rate_to_per_second(s.fit.rate)) << '\n';
    }
}

PhotonRecord photon_number(const AmplitudeState& state) {
  PhotonRecord rec;
  rec.t = state.t;
  rec.truncated = state.truncated;
  for (std::size_t n = 0; n < state.modes.size(); ++n) {
    ModeSeries s;
    s.mode = state.modes[n].index;
    s.epsilon = state.modes[n].epsilon;
    s.N.resize(state.t.size());
    const double w2 = 2.0 * state.modes[n].omega_bar;
    for (std::size_t i = 0; i < state.t.size(); ++i) {
      double acc = 0.0;
      for (std::size_t sd = 0; sd < state.seeds.size(); ++sd)
        acc += std::norm(state.A[i][state.slot(sd, n)]);
      s.N[i] = w2 * acc;
    }
    s.fit = fit_growth(state.t, s.N, s.epsilon);
    rec.modes.push_back(std::move(s));
  }
  return rec;
}

std::vector<double> uniform_grid(double t_end, int intervals) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be >= 0");
  if (intervals < 1) throw DomainError("time grid needs at least one interval");
  if (t_end == 0.0) return {0.0};
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) t[i] = t_end * i / intervals;
  return t;
}

}  // namespace dcesim
