#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dcesim/spectrum.hpp"
#include "dcesim/units.hpp"
#include "oracles.hpp"

using namespace dcesim;
using units::kPi;

TEST(SolveK, TransparentFilmGivesOddCavityMode) {
  EXPECT_NEAR(solve_k(0.0, 1.0, 1), kPi, 1e-15);
  EXPECT_NEAR(solve_k(0.0, 0.3, 4), 7 * kPi / 0.3, 1e-12);
}

TEST(SolveK, PerfectConductorLimit) {
  const double k = solve_k(1e20, 1.0, 1);
  EXPECT_NEAR(k / (2 * kPi) - 1.0, 0.0, 1e-10);
  EXPECT_EQ(solve_k(std::numeric_limits<double>::infinity(), 1.0, 3), 6 * kPi);
}

TEST(SolveK, MatchesHighPrecisionBisection) {
  EXPECT_NEAR(solve_k(1e13, 1e-2, 1) / oracle::kRootV1e13Lx1e2 - 1.0, 0.0, 1e-12);
  EXPECT_NEAR(solve_k(1e10, 1e-2, 1) / oracle::kRootV1e10Lx1e2 - 1.0, 0.0, 1e-12);
  EXPECT_NEAR(solve_k(3.0, 1.0, 2) / oracle::kRootV3L1m2 - 1.0, 0.0, 1e-13);
  EXPECT_NEAR(solve_k(1e3, 2.0, 4) / oracle::kRootV1e3L2m4 - 1.0, 0.0, 1e-13);
  const double L = 4.8, V = 10.0 / 4.8;
  const double ref[] = {oracle::kRootL48m1, oracle::kRootL48m2, oracle::kRootL48m3,
                        oracle::kRootL48m4, oracle::kRootL48m5};
  for (int m = 1; m <= 5; ++m) EXPECT_NEAR(solve_k(V, L, m) / ref[m - 1] - 1.0, 0.0, 1e-13);
}

TEST(SolveK, StrongFilmRootSitsJustBelowBranchEnd) {
  const double k = solve_k(1e13, 1e-2, 1);
  const double delta = kPi - 0.5 * k * 1e-2;
  EXPECT_NEAR(delta / (2 * k / 1e13), 1.0, 1e-5);
  EXPECT_NEAR(delta, 1.26e-10, 0.01e-10);
}

TEST(SolveK, RejectsBadInput) {
  EXPECT_THROW(solve_k(-1.0, 1.0, 1), DomainError);
  EXPECT_THROW(solve_k(1.0, 0.0, 1), DomainError);
  EXPECT_THROW(solve_k(1.0, 1.0, 0), DomainError);
  EXPECT_THROW(solve_k(std::nan(""), 1.0, 1), DomainError);
}

TEST(SolveK, ClampsAtBranchEndAndFlags) {
  const auto r = solve_k_detail(1e30, 1e-2, 1);
  EXPECT_TRUE(r.clamped);
  EXPECT_EQ(r.k, 2 * kPi / 1e-2);
  EXPECT_FALSE(solve_k_detail(1e3, 1e-2, 1).clamped);
}

TEST(SolveKProperty, RootInsideBracketWithSmallResidual) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> logV(-2.0, 20.0), logL(-3.0, 1.0);
  std::uniform_int_distribution<int> branch(1, 12);
  for (int i = 0; i < 3000; ++i) {
    const double V = i % 50 == 0 ? 0.0 : std::pow(10.0, logV(rng));
    const double L = std::pow(10.0, logL(rng));
    const int m = branch(rng);
    const auto r = solve_k_detail(V, L, m);
    ASSERT_GE(r.k, (2 * m - 1) * kPi / L) << V << ' ' << L << ' ' << m;
    ASSERT_LE(r.k, 2 * m * kPi / L) << V << ' ' << L << ' ' << m;
    ASSERT_LE(r.relative_residual, 1e-8);
    if (V > 0.0 && V * L < 1e6) {
      // the cotangent form itself loses digits once the root crowds the branch end
      const double res = std::abs(2 * r.k / std::tan(0.5 * r.k * L) + V) / V;
      ASSERT_LT(res, 1e-6) << V << ' ' << L << ' ' << m;
    }
  }
}

TEST(SolveKProperty, MonotoneInV) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logV(-1.0, 15.0);
  for (int i = 0; i < 500; ++i) {
    double a = std::pow(10.0, logV(rng)), b = std::pow(10.0, logV(rng));
    if (a > b) std::swap(a, b);
    if (b < a * (1 + 1e-6)) continue;
    const int m = 1 + i % 5;
    ASSERT_LE(solve_k(a, 0.05, m), solve_k(b, 0.05, m));
  }
}

TEST(SolveK, DerivativeMatchesFiniteDifference) {
  for (double V : {0.5, 3.0, 50.0, 1e4}) {
    const double L = 1.3;
    const double k = solve_k(V, L, 2);
    const double h = 1e-5 * V;
    const double fd = (solve_k(V + h, L, 2) - solve_k(V - h, L, 2)) / (2 * h);
    EXPECT_NEAR(dk_dV(k, V, L) / fd, 1.0, 1e-7);
    const double fd2 = (dk_dV(solve_k(V + h, L, 2), V + h, L) - dk_dV(solve_k(V - h, L, 2), V - h, L)) / (2 * h);
    EXPECT_NEAR(d2k_dV2(k, V, L) / fd2, 1.0, 1e-5);
  }
}

TEST(Epsilon, ClosedFormExamples) {
  CavityConfig c;
  c.Lx = 1e-2;
  c.V0 = 1e13;
  c.Vmax = 1e16;
  EXPECT_NEAR(epsilon_n(c, solve_k(c.V0, c.Lx, 1)) / oracle::kEpsV1e13, 1.0, 1e-12);
  c.V0 = 1e10;
  EXPECT_NEAR(epsilon_n(c, solve_k(c.V0, c.Lx, 1)) / oracle::kEpsV1e10, 1.0, 1e-12);
  c.Vmax = c.V0;
  EXPECT_EQ(epsilon_n(c, 628.3), 0.0);
}

TEST(Epsilon, WarnsOutsideValidityRange) {
  CavityConfig c;
  c.Lx = 1e-2;
  c.V0 = 1e3;
  c.Vmax = 1e6;
  Diagnostics d;
  epsilon_n(c, 300.0, &d);
  ASSERT_EQ(d.warnings.size(), 1u);
  c.V0 = 1e12;
  c.Vmax = 1e16;
  Diagnostics ok;
  epsilon_n(c, 300.0, &ok);
  EXPECT_TRUE(ok.warnings.empty());
  EXPECT_NEAR(c.validity_ratio(), 1e10 / 1e4, 1e-6);
}

TEST(Epsilon, VmaxForEpsilonInverts) {
  CavityConfig c;
  c.Lx = 4.8;
  c.V0 = 10.0 / 4.8;
  c.Vmax = vmax_for_epsilon(c, 1, 1e-3);
  EXPECT_NEAR(epsilon_n(c, solve_k(c.V0, c.Lx, 1)), 1e-3, 1e-15);
}

TEST(LinearisationProperty, ErrorIsSecondOrderInEpsilon) {
  // Holds while the swing is small next to V0 itself (V0 Lx of order ten).
  for (double eps : {1e-4, 3e-5, 1e-5}) {
    for (double V0L : {0.5, 2.0, 10.0}) {
      CavityConfig c;
      c.Lx = 1.0;
      c.V0 = V0L;
      for (int m = 1; m <= 3; ++m) {
        c.Vmax = vmax_for_epsilon(c, m, eps);
        const double k0 = solve_k(c.V0, c.Lx, m);
        const double exact = solve_k(c.Vmax, c.Lx, m);
        ASSERT_LT(std::abs(exact - k0 * (1 + eps)) / k0, 10 * eps * eps) << eps << ' ' << V0L << ' ' << m;
      }
    }
  }
}

TEST(BuildSpectrum, NoRenormalisationWithoutDcDrive) {
  CavityConfig c{1.0, 1.0, 1.0, 1e3, 1e4};
  const auto sp = build_spectrum(c, 0.0, {3, 3, 3});
  for (const auto& e : sp.psi()) EXPECT_EQ(e.omega_bar, e.omega_tilde);
}

TEST(BuildSpectrum, LongCavityFrequencyApproachesK0) {
  CavityConfig c{1e-2, 1.0, 1.0, 1e12, 1e16};
  const auto sp = build_spectrum(c, 0.5, {1, 1, 1});
  const auto& e = sp.at({1, 1, 1});
  const double bound = ((kPi / c.Ly) * (kPi / c.Ly) + (kPi / c.Lz) * (kPi / c.Lz)) / (2 * e.k0 * e.k0);
  EXPECT_LE(e.omega_bar / e.k0 - 1.0, bound * (1 + 1e-9));
  EXPECT_GT(e.omega_bar / e.k0 - 1.0, 0.9 * bound);
}

TEST(BuildSpectrum, PhiFrequencyClosedForm) {
  CavityConfig c{0.02, 0.3, 0.7, 1e5, 2e5};
  const auto sp = build_spectrum(c, 0.5, {2, 2, 2});
  const double w = kPi * std::sqrt(4 / (c.Lx * c.Lx) + 1 / (c.Ly * c.Ly) + 1 / (c.Lz * c.Lz));
  EXPECT_NEAR(sp.phi()[0].omega_bar / w, 1.0, 1e-15);
  EXPECT_EQ(sp.phi()[0].epsilon, 0.0);
}

TEST(BuildSpectrum, TableInvariants) {
  CavityConfig c{0.05, 0.2, 0.3, 1e4, 5e4};
  const auto sp = build_spectrum(c, 0.5, {4, 3, 2});
  ASSERT_EQ(sp.psi().size(), 24u);
  for (const auto& e : sp.psi()) {
    const int m = e.index.mx;
    EXPECT_GT(e.k0, (2 * m - 1) * kPi / c.Lx);
    EXPECT_LE(e.k0, 2 * m * kPi / c.Lx);
    EXPECT_GT(e.epsilon, 0.0);
    const double ky = kPi * e.index.my / c.Ly, kz = kPi * e.index.mz / c.Lz;
    EXPECT_NEAR(e.omega_bar * e.omega_bar, e.k0 * e.k0 + ky * ky + kz * kz, 1e-9 * e.omega_bar * e.omega_bar);
    const double kt = e.k0 * (1 + e.epsilon * 0.5);
    EXPECT_NEAR(e.omega_tilde * e.omega_tilde, kt * kt + ky * ky + kz * kz, 1e-9 * e.omega_bar * e.omega_bar);
    EXPECT_EQ(&sp.psi()[sp.index_of(e.index)], &e);
  }
  EXPECT_THROW(sp.index_of({5, 1, 1}), PreconditionError);
}

TEST(ModeIndexParse, RoundTripAndErrors) {
  EXPECT_EQ(ModeIndex::parse("2,3,1"), (ModeIndex{2, 3, 1}));
  EXPECT_EQ(ModeIndex::parse((ModeIndex{4, 1, 9}).str()), (ModeIndex{4, 1, 9}));
  EXPECT_THROW(ModeIndex::parse("0,1,1"), DomainError);
  EXPECT_THROW(ModeIndex::parse("1;1;1"), DomainError);
  EXPECT_THROW(ModeIndex::parse("1,1,1x"), DomainError);
}

TEST(CavityConfigValidate, RejectsNonPhysical) {
  EXPECT_THROW((CavityConfig{-1, 1, 1, 1, 2}).validate(), DomainError);
  EXPECT_THROW((CavityConfig{1, 1, 1, 2, 1}).validate(), DomainError);
  EXPECT_THROW((CavityConfig{1, 1, 1, 0, 1}).validate(), DomainError);
  EXPECT_NO_THROW((CavityConfig{1, 1, 1, 1, 1}).validate());
}
