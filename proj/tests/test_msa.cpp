#include <gtest/gtest.h>

#include <cmath>

#include "dcesim/msa.hpp"
#include "dcesim/units.hpp"

using namespace dcesim;
using units::kPi;

namespace {

struct Resonant {
  ModeSpectrum sp;
  FourierSeries drive;
  const ModeEntry* e = nullptr;
};

// Single-harmonic drive tuned to 2 w~ of mode (1,1,1) in a long, wide cavity.
Resonant resonant_setup(double eps, int j = 1) {
  CavityConfig c{4.8, 1000.0, 1000.0, 10.0 / 4.8, 1.0};
  c.Vmax = vmax_for_epsilon(c, 1, eps);
  Resonant r;
  const auto base = fourier_series(DriveProfile::raised_cosine(1.0), 1);
  r.sp = build_spectrum(c, base.f0(), {3, 1, 1});
  r.e = &r.sp.at({1, 1, 1});
  std::vector<Harmonic> hs{{j, 0.5, kPi}};
  r.drive = FourierSeries(2 * r.e->omega_tilde / j, 0.5, hs);
  return r;
}

}  // namespace

TEST(InitialAmplitudes, ReproduceVacuumModeFunction) {
  const auto r = resonant_setup(1e-3);
  cplx A, B;
  initial_amplitudes(*r.e, A, B);
  const double wb = r.e->omega_bar, wt = r.e->omega_tilde;
  // P(0) = A + B = 1/sqrt(2 w_bar) and P'(0) = i w~ (A - B) = -i sqrt(w_bar / 2)
  EXPECT_NEAR(std::abs(A + B - 1.0 / std::sqrt(2 * wb)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cplx(0, wt) * (A - B) - cplx(0, -std::sqrt(wb / 2))), 0.0, 1e-14);
  EXPECT_LT(2 * wb * std::norm(A), r.e->epsilon * r.e->epsilon);
}

TEST(MsaParametric, GrowsAtTheConductivityRate) {
  const auto r = resonant_setup(1e-3);
  const double rc = 2 * r.e->k0 * r.e->k0 * 0.5 * r.e->epsilon / (2 * r.e->omega_tilde);
  const auto t = uniform_grid(8.0 / rc, 400);
  const auto run = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, t);
  EXPECT_NEAR(run.r_cond / rc, 1.0, 1e-14);
  const auto& s = run.photons.modes[0];
  EXPECT_EQ(s.fit.status, GrowthStatus::growing);
  EXPECT_NEAR(s.fit.rate / rc, 1.0, 0.01);
  for (std::size_t i = t.size() / 4; i < t.size(); ++i)
    EXPECT_NEAR(s.N[i] / s.N_approx[i], 1.0, 0.02);
  EXPECT_LT(s.N[0], r.e->epsilon * r.e->epsilon);
}

TEST(MsaParametric, RateIndependentOfHarmonicIndexAtFixedFrequency) {
  const auto r1 = resonant_setup(1e-3, 1);
  const auto r3 = resonant_setup(1e-3, 3);
  const auto t = uniform_grid(1.0, 4);
  EXPECT_NEAR(msa_parametric(r1.sp, r1.drive, {1, 1, 1}, 1, t).r_cond /
                  msa_parametric(r3.sp, r3.drive, {1, 1, 1}, 3, t).r_cond,
              1.0, 1e-14);
}

TEST(MsaParametric, RefusesWithoutResonance) {
  auto r = resonant_setup(1e-3);
  const auto t = uniform_grid(1.0, 4);
  const auto off = r.drive.with_omega(r.drive.omega() * 1.01);
  try {
    msa_parametric(r.sp, off, {1, 1, 1}, 1, t);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("parametric condition"), std::string::npos);
  }
  EXPECT_THROW(msa_parametric(r.sp, r.drive, {1, 1, 1}, 2, t), PreconditionError);
  EXPECT_THROW(msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, {1.0, 2.0}), PreconditionError);
}

TEST(MsaParametric, TruncatesBeforeOverflow) {
  const auto r = resonant_setup(1e-3);
  const auto probe = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, {0.0});
  MsaOptions opt;
  opt.max_exponent = 20;
  const double x_end = 42.0;
  const auto t = uniform_grid(x_end / (probe.kappa * r.e->epsilon), 10);
  const auto run = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, t, opt);
  EXPECT_TRUE(run.state.truncated);
  EXPECT_EQ(run.state.t.size(), 5u);
  EXPECT_EQ(run.photons.t.size(), 5u);
}

TEST(MsaGeneral, ReducesToClosedFormForIsolatedResonance) {
  const auto r = resonant_setup(1e-3);
  const auto table = coupling_coeffs(r.sp);
  const double rc = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, {0.0}).r_cond;
  const auto t = uniform_grid(6.0 / rc, 60);
  const auto closed = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, t);
  const auto gen = msa_general(r.sp, table, r.drive, t);
  const auto cc = msa_channels(r.sp, table, r.drive);
  EXPECT_EQ(cc.parametric, 1);
  // the n = m sum channel matches too, with zero weight at exact resonance
  EXPECT_EQ(cc.coupling, 1);
  const std::size_t n = gen.mode_position({1, 1, 1});
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double scale = std::abs(closed.state.B[i][0]);
    EXPECT_LT(std::abs(gen.a(i, n, n) - closed.state.A[i][0]) / scale, 1e-8);
    EXPECT_LT(std::abs(gen.b(i, n, n) - closed.state.B[i][0]) / scale, 1e-8);
  }
  // other modes and cross-seed slots stay at their initial values
  const std::size_t m = gen.mode_position({2, 1, 1});
  EXPECT_EQ(gen.a(t.size() - 1, n, m), cplx(0.0));
  EXPECT_EQ(gen.b(t.size() - 1, m, m), gen.b(0, m, m));
}

TEST(MsaGeneral, DifferenceChannelTransfersAmplitude) {
  CavityConfig c{4.8, 1000.0, 1000.0, 10.0 / 4.8, 1.0};
  c.Vmax = vmax_for_epsilon(c, 1, 1e-3);
  const auto sp = build_spectrum(c, 0.5, {3, 1, 1});
  const auto table = coupling_coeffs(sp);
  const double w1 = sp.at({1, 1, 1}).omega_tilde, w2 = sp.at({2, 1, 1}).omega_tilde;
  const FourierSeries tuned(w2 - w1, 0.5, {{1, 0.5, kPi}});
  const auto cc = msa_channels(sp, table, tuned);
  EXPECT_EQ(cc.parametric, 0);
  EXPECT_EQ(cc.coupling, 2);
  const auto t = uniform_grid(2000.0, 20);
  const auto st = msa_general(sp, table, tuned, t);
  const std::size_t a = st.mode_position({1, 1, 1}), b = st.mode_position({2, 1, 1});
  EXPECT_GT(std::abs(st.b(t.size() - 1, a, b)), 1e-3 * std::abs(st.b(0, a, a)));

  const FourierSeries off(1.37 * (w2 - w1), 0.5, {{1, 0.5, kPi}});
  const auto st_off = msa_general(sp, table, off, t);
  EXPECT_EQ(st_off.b(t.size() - 1, a, b), cplx(0.0));
}

TEST(MsaGeneral, TruncatesAllClassesTogether) {
  const auto r = resonant_setup(1e-3);
  const auto table = coupling_coeffs(r.sp);
  const double rc = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, {0.0}).r_cond;
  MsaOptions opt;
  opt.max_exponent = 10;
  const auto st = msa_general(r.sp, table, r.drive, uniform_grid(40.0 / rc, 40), opt);
  EXPECT_TRUE(st.truncated);
  EXPECT_LT(st.t.size(), 41u);
  EXPECT_EQ(st.A.size(), st.t.size());
  EXPECT_THROW(msa_general(r.sp, CouplingTable(), r.drive, {0.0}), PreconditionError);
}

TEST(Detuned, ZeroDetuningMatchesClosedForm) {
  const auto r = resonant_setup(1e-3);
  const double rc = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, {0.0}).r_cond;
  const auto t = uniform_grid(5.0 / rc, 50);
  const auto a = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, t);
  const auto b = detuned_parametric(r.sp, r.drive, {1, 1, 1}, 1, 0.0, t);
  EXPECT_NEAR(b.r_cond / a.r_cond, 1.0, 1e-14);
  for (std::size_t i = 0; i < t.size(); ++i)
    EXPECT_NEAR(b.photons.modes[0].N[i] / a.photons.modes[0].N[i], 1.0, 1e-8);
}

TEST(Detuned, SmallDetuningStillGrowsLargeDoesNot) {
  const auto r = resonant_setup(1e-2);
  const double eps = r.e->epsilon, W = 2 * r.e->omega_tilde;
  const double rc = msa_parametric(r.sp, r.drive, {1, 1, 1}, 1, {0.0}).r_cond;
  const auto t = uniform_grid(12.0 / rc, 600);
  // delta/Omega_j = eps/10 with Omega_j = 2 w~ + delta
  const double d_small = 0.1 * eps * W / (1 - 0.1 * eps);
  const auto grow = detuned_parametric(r.sp, r.drive, {1, 1, 1}, 1, d_small, t);
  EXPECT_EQ(grow.photons.modes[0].fit.status, GrowthStatus::growing);
  EXPECT_NEAR(grow.photons.modes[0].fit.rate / rc, 1.0, 0.2);
  const double d_big = 10 * eps * W / (1 - 10 * eps);
  const auto flat = detuned_parametric(r.sp, r.drive, {1, 1, 1}, 1, d_big, uniform_grid(3.0 / eps, 600));
  double mx = 0.0;
  for (double v : flat.photons.modes[0].N) mx = std::max(mx, v);
  EXPECT_LT(mx, 100 * eps * eps);
  EXPECT_EQ(flat.r_cond, 0.0);
  EXPECT_THROW(detuned_parametric(r.sp, r.drive, {1, 1, 1}, 1, 2 * d_big, t), PreconditionError);
}

TEST(Detuned, GrowthRateFormula) {
  EXPECT_DOUBLE_EQ(detuned_growth_rate(1e-3, 50.0, 0.0), 0.1);
  EXPECT_NEAR(detuned_growth_rate(1e-3, 50.0, 0.06), 2 * std::sqrt(0.05 * 0.05 - 0.03 * 0.03), 1e-15);
  EXPECT_EQ(detuned_growth_rate(1e-3, 50.0, 0.1), 0.0);
  EXPECT_EQ(detuned_growth_rate(1e-3, 50.0, -0.5), 0.0);
}

TEST(RateRatio, Examples) {
  EXPECT_EQ(rate_ratio(1e-2, 1.0, 1e-8, 1.0), 1e6);
  EXPECT_EQ(rate_ratio(1e-2, 3e-12, 1e-8, 3e-12), 1e6);
  EXPECT_DOUBLE_EQ(rate_ratio(1e-3, 2.0, 1e-8, 1.0), 5e4);
  EXPECT_THROW(rate_ratio(0.0, 1.0, 1e-8, 1.0), PreconditionError);
  EXPECT_THROW(rate_ratio(1e-2, -1.0, 1e-8, 1.0), PreconditionError);
}

TEST(FitGrowth, ExponentialBoundedAndEmpty) {
  std::vector<double> t, grow, flat, tiny;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(i * 0.1);
    grow.push_back(std::pow(std::sinh(0.5 * i * 0.1), 2));
    flat.push_back(1.0 + 0.1 * std::sin(i * 0.3));
    tiny.push_back(1e-12);
  }
  const auto g = fit_growth(t, grow, 1e-3);
  EXPECT_EQ(g.status, GrowthStatus::growing);
  EXPECT_NEAR(g.rate, 1.0, 0.01);
  const auto b = fit_growth(t, flat, 1e-3);
  EXPECT_EQ(b.status, GrowthStatus::bounded);
  EXPECT_EQ(b.rate, 0.0);
  EXPECT_EQ(fit_growth(t, tiny, 1e-3).status, GrowthStatus::no_growth);
  EXPECT_THROW(fit_growth(t, std::vector<double>(3), 1e-3), PreconditionError);
}

TEST(UniformGrid, EndpointsAndDegenerate) {
  const auto g = uniform_grid(2.0, 4);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 2.0);
  EXPECT_EQ(uniform_grid(0.0, 10).size(), 1u);
  EXPECT_THROW(uniform_grid(-1.0, 3), DomainError);
  EXPECT_EQ(fmt(1.0), "1.00000000000e+00");
}
