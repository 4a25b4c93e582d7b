#include "dcesim/drive.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <sstream>

#include "dcesim/units.hpp"

namespace dcesim {

using units::kPi;
using units::kTwoPi;
using cplx = std::complex<double>;

namespace {

double fold_phase(double c) {
  // (-pi, pi]
  if (c <= -kPi) c += kTwoPi;
  if (c > kPi) c -= kTwoPi;
  return c;
}

Harmonic harmonic_from(int j, double l, double h) {
  const double amp = std::hypot(l, h);
  const double phase = amp > 0.0 ? fold_phase(std::atan2(-h, l)) : 0.0;
  return {j, amp, phase};
}

}  // namespace

FourierSeries::FourierSeries(double omega, double f0, std::vector<Harmonic> harmonics)
    : omega_(omega), f0_(f0), harmonics_(std::move(harmonics)) {
  if (!(omega_ > 0.0) || !std::isfinite(omega_))
    throw DomainError("Fourier fundamental must be positive");
  for (const auto& h : harmonics_)
    if (h.j < 1 || h.amplitude < 0.0) throw DomainError("harmonics need j >= 1, f_j >= 0");
  std::sort(harmonics_.begin(), harmonics_.end(),
            [](const Harmonic& a, const Harmonic& b) { return a.j < b.j; });
}

double FourierSeries::period() const { return kTwoPi / omega_; }

int FourierSeries::j_max() const { return harmonics_.empty() ? 0 : harmonics_.back().j; }

double FourierSeries::amplitude(int j) const {
  for (const auto& h : harmonics_)
    if (h.j == j) return h.amplitude;
  return 0.0;
}

double FourierSeries::phase(int j) const {
  for (const auto& h : harmonics_)
    if (h.j == j) return h.phase;
  return 0.0;
}

DriveDerivatives FourierSeries::eval(double t) const {
  DriveDerivatives d{f0_, 0.0, 0.0};
  if (harmonics_.empty()) return d;
  const double theta = omega_ * t;
  const cplx z(std::cos(theta), std::sin(theta));
  cplx zj(1.0, 0.0);
  int j_cur = 0;
  for (const auto& h : harmonics_) {
    if (h.j - j_cur > 4) {
      zj = std::polar(1.0, h.j * theta);
    } else {
      while (j_cur < h.j) {
        zj *= z;
        ++j_cur;
      }
    }
    j_cur = h.j;
    const cplx e = zj * std::polar(h.amplitude, h.phase);
    const double w = h.j * omega_;
    d.f += e.real();
    d.df -= w * e.imag();
    d.d2f -= w * w * e.real();
  }
  return d;
}

FourierSeries FourierSeries::only(int j) const {
  std::vector<Harmonic> keep;
  for (const auto& h : harmonics_)
    if (h.j == j) keep.push_back(h);
  if (keep.empty()) throw PreconditionError("harmonic " + std::to_string(j) + " not in the table");
  return FourierSeries(omega_, f0_, std::move(keep));
}

FourierSeries FourierSeries::with_omega(double omega) const {
  return FourierSeries(omega, f0_, harmonics_);
}

double FourierSeries::parseval_sum() const {
  double s = f0_ * f0_;
  for (const auto& h : harmonics_) s += 0.5 * h.amplitude * h.amplitude;
  return s;
}

std::string to_string(DriveShape s) {
  switch (s) {
    case DriveShape::linear_ramp: return "linear_ramp";
    case DriveShape::raised_cosine: return "raised_cosine";
    case DriveShape::sampled: return "sampled";
  }
  return "?";
}

DriveShape parse_drive_shape(const std::string& s) {
  if (s == "linear_ramp") return DriveShape::linear_ramp;
  if (s == "raised_cosine") return DriveShape::raised_cosine;
  if (s == "sampled") return DriveShape::sampled;
  throw DomainError("unknown drive shape \"" + s + "\"");
}

DriveProfile DriveProfile::linear_ramp(double period_s, double tau_e_s) {
  if (!(period_s > 0.0) || !std::isfinite(period_s)) throw DomainError("period must be positive");
  if (!(tau_e_s > 0.0) || !(tau_e_s < period_s))
    throw DomainError("ramp needs 0 < tau_e < T");
  DriveProfile p;
  p.shape_ = DriveShape::linear_ramp;
  p.period_s_ = period_s;
  p.tau_e_s_ = tau_e_s;
  return p;
}

DriveProfile DriveProfile::raised_cosine(double period_s) {
  if (!(period_s > 0.0) || !std::isfinite(period_s)) throw DomainError("period must be positive");
  DriveProfile p;
  p.shape_ = DriveShape::raised_cosine;
  p.period_s_ = period_s;
  p.tau_e_s_ = 0.5 * period_s;
  return p;
}

DriveProfile DriveProfile::sampled(std::vector<DriveSample> samples) {
  if (samples.size() < 2) throw DomainError("sampled drive needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].t) || !std::isfinite(samples[i].f))
      throw DomainError("sampled drive has a non-finite entry at row " + std::to_string(i + 1));
    if (samples[i].f < 0.0)
      throw DomainError("sampled drive must be non-negative (row " + std::to_string(i + 1) + ")");
    if (i > 0 && !(samples[i].t > samples[i - 1].t))
      throw DomainError("sample times must increase strictly (row " + std::to_string(i + 1) + ")");
  }
  const double t0 = samples.front().t;
  for (auto& s : samples) s.t -= t0;
  DriveProfile p;
  p.shape_ = DriveShape::sampled;
  p.period_s_ = samples.back().t;
  const auto peak = std::max_element(samples.begin(), samples.end(),
                                     [](const auto& a, const auto& b) { return a.f < b.f; });
  p.tau_e_s_ = peak->t;
  p.samples_ = std::move(samples);
  return p;
}

DriveProfile DriveProfile::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("drive CSV is empty");
  std::vector<DriveSample> samples;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    DriveSample s;
    if (!(is >> s.t >> s.f))
      throw DomainError("drive CSV row " + std::to_string(row) + " is not two numbers");
    samples.push_back(s);
  }
  return sampled(std::move(samples));
}

DriveProfile DriveProfile::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open drive CSV \"" + path + "\"");
  return read_csv(in);
}

std::vector<DriveSample> DriveProfile::linear_nodes() const {
  switch (shape_) {
    case DriveShape::linear_ramp: return {{0.0, 0.0}, {tau_e_s_, 1.0}, {period_s_, 0.0}};
    case DriveShape::sampled: return samples_;
    case DriveShape::raised_cosine: break;
  }
  throw PreconditionError("raised_cosine profile has no piecewise-linear nodes");
}

double DriveProfile::mean_square() const {
  if (shape_ == DriveShape::raised_cosine) return 3.0 / 8.0;
  const auto nodes = linear_nodes();
  double s = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double a = nodes[i - 1].f, b = nodes[i].f, h = nodes[i].t - nodes[i - 1].t;
    s += h * (a * a + a * b + b * b) / 3.0;
  }
  return s / period_s_;
}

double eval_f(const DriveProfile& p, double t_s) {
  const double T = p.period_s();
  double s = std::fmod(t_s, T);
  if (s < 0.0) s += T;
  switch (p.shape()) {
    case DriveShape::linear_ramp: {
      const double tau = p.tau_e_s();
      if (s <= tau) return s / tau;
      return (T - s) / (T - tau);
    }
    case DriveShape::raised_cosine:
      return 0.5 * (1.0 - std::cos(kTwoPi * s / T));
    case DriveShape::sampled: {
      const auto& v = p.samples();
      auto it = std::upper_bound(v.begin(), v.end(), s,
                                 [](double x, const DriveSample& d) { return x < d.t; });
      if (it == v.begin()) return v.front().f;
      if (it == v.end()) return v.back().f;
      const auto& b = *it;
      const auto& a = *(it - 1);
      return a.f + (b.f - a.f) * (s - a.t) / (b.t - a.t);
    }
  }
  return 0.0;
}

FourierSeries fourier_ramp(double period_s, double tau_e_s, int j_max) {
  if (!(tau_e_s > 0.0) || !(tau_e_s < period_s)) throw DomainError("ramp needs 0 < tau_e < T");
  if (j_max < 0) throw DomainError("j_max must be >= 0");
  const double r = tau_e_s / period_s;
  std::vector<Harmonic> hs;
  hs.reserve(static_cast<std::size_t>(j_max));
  for (int j = 1; j <= j_max; ++j) {
    const double denom = 2.0 * kPi * kPi * j * j * r * (1.0 - r);
    const double a = kTwoPi * j * r;
    // cos(a) - 1 = -2 sin^2(a/2) avoids cancellation for small a.
    const double s = std::sin(0.5 * a);
    const double l = -2.0 * s * s / denom;
    const double h = std::sin(a) / denom;
    hs.push_back(harmonic_from(j, l, h));
  }
  return FourierSeries(kTwoPi / units::seconds_to_length(period_s), 0.5, std::move(hs));
}

namespace {

// (sin x - x cos x) / x^3
double q_factor(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return 1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0;
  }
  return (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

FourierSeries fourier_numeric(const DriveProfile& profile, int j_max) {
  if (j_max < 0) throw DomainError("j_max must be >= 0");
  const double T = profile.period_s();
  std::vector<DriveSample> nodes;
  if (profile.shape() == DriveShape::raised_cosine) {
    const int n = std::max(4096, 64 * j_max);
    nodes.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double t = T * i / n;
      nodes[i] = {t, eval_f(profile, t)};
    }
  } else {
    nodes = profile.linear_nodes();
  }
  if (profile.shape() == DriveShape::sampled && j_max > 0) {
    double h_max = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i)
      h_max = std::max(h_max, nodes[i].t - nodes[i - 1].t);
    const double per_period = (T / j_max) / h_max;
    if (per_period < 8.0 * (1.0 - 1e-9)) {
      std::ostringstream os;
      os << "sampled drive too coarse for " << j_max << " harmonics: " << per_period
         << " samples per period of the highest harmonic (need 8)";
      throw ResolutionError(os.str());
    }
  }

  double mean = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    mean += 0.5 * (nodes[i].f + nodes[i - 1].f) * (nodes[i].t - nodes[i - 1].t);
  mean /= T;

  std::vector<Harmonic> hs;
  hs.reserve(static_cast<std::size_t>(j_max));
  for (int j = 1; j <= j_max; ++j) {
    const double w = kTwoPi * j / T;
    cplx acc(0.0, 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const double h = nodes[i].t - nodes[i - 1].t;
      const double a = 0.5 * h;
      const double tm = nodes[i - 1].t + a;
      const double gbar = 0.5 * (nodes[i].f + nodes[i - 1].f);
      const double slope = (nodes[i].f - nodes[i - 1].f) / h;
      const double x = w * a;
      const cplx seg(gbar * h * sinc(x), -2.0 * slope * a * a * x * q_factor(x));
      acc += std::polar(1.0, -w * tm) * seg;
    }
    // (2/T) int f e^{-i w t} dt = l_j - i h_j
    const cplx c = (2.0 / T) * acc;
    hs.push_back(harmonic_from(j, c.real(), -c.imag()));
  }
  return FourierSeries(kTwoPi / units::seconds_to_length(T), mean, std::move(hs));
}

FourierSeries fourier_series(const DriveProfile& profile, int j_max) {
  switch (profile.shape()) {
    case DriveShape::linear_ramp:
      return fourier_ramp(profile.period_s(), profile.tau_e_s(), j_max);
    case DriveShape::raised_cosine: {
      std::vector<Harmonic> hs;
      if (j_max >= 1) hs.push_back({1, 0.5, kPi});
      return FourierSeries(kTwoPi / units::seconds_to_length(profile.period_s()), 0.5,
                           std::move(hs));
    }
    case DriveShape::sampled: return fourier_numeric(profile, j_max);
  }
  throw DomainError("unknown drive shape");
}

FourierSeries smooth_kinks(const FourierSeries& series, double width) {
  if (!(width >= 0.0) || !std::isfinite(width)) throw DomainError("smoothing width must be >= 0");
  std::vector<Harmonic> hs = series.harmonics();
  for (auto& h : hs) h.amplitude *= std::abs(sinc(0.5 * h.j * series.omega() * width));
  // A negative sinc flips the sign of the harmonic: fold it into the phase.
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (sinc(0.5 * hs[i].j * series.omega() * width) < 0.0)
      hs[i].phase = fold_phase(hs[i].phase + kPi);
  return FourierSeries(series.omega(), series.f0(), std::move(hs));
}

double parseval_defect(const DriveProfile& profile, const FourierSeries& series) {
  return profile.mean_square() - series.parseval_sum();
}

double parseval_tail_bound(const DriveProfile& profile, int j_max) {
  if (profile.shape() == DriveShape::raised_cosine) return j_max >= 1 ? 0.0 : 0.125;
  const auto nodes = profile.linear_nodes();
  const double T = profile.period_s();
  const double W = kTwoPi / T;
  // Slope jumps at interior nodes and at the wrap-around t = 0 = T.
  std::vector<double> slopes;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    slopes.push_back((nodes[i].f - nodes[i - 1].f) / (nodes[i].t - nodes[i - 1].t));
  double S = 0.0;
  for (std::size_t i = 1; i < slopes.size(); ++i) S += std::abs(slopes[i] - slopes[i - 1]);
  S += std::abs(slopes.front() - slopes.back());
  const double jump = std::abs(nodes.back().f - nodes.front().f);
  if (j_max < 1) {
    // Only the mean is kept: the defect is the variance, bounded by max f^2.
    double m = 0.0;
    for (const auto& n : nodes) m = std::max(m, n.f * n.f);
    return m;
  }
  // |f_j| <= (2/T) (jump / (j W) + S / (j W)^2); sum the square over j > J with
  // sum_{j>J} j^-p <= J^(1-p) / (p - 1).
  const double J = j_max;
  const double a = 2.0 * jump / (T * W), b = 2.0 * S / (T * W * W);
  const double tail = a * a / J + a * b / (J * J) + b * b / (3.0 * J * J * J);
  return 0.5 * tail;
}

ConductivityState conductivity_at(const ModeSpectrum& spectrum, const DriveProfile& profile,
                                  double t_s, bool with_exact) {
  const auto& cfg = spectrum.cavity();
  const double f = eval_f(profile, t_s);
  ConductivityState st;
  st.V = cfg.V0 + (cfg.Vmax - cfg.V0) * f;
  const int nx = spectrum.cut().nx;
  const int stride = spectrum.cut().ny * spectrum.cut().nz;
  for (int mx = 1; mx <= nx; ++mx) {
    const auto& e = spectrum.psi()[static_cast<std::size_t>((mx - 1) * stride)];
    st.k_linear.push_back(e.k0 * (1.0 + e.epsilon * f));
    if (with_exact) st.k_exact.push_back(solve_k(st.V, cfg.Lx, mx));
  }
  return st;
}

}  // namespace dcesim
