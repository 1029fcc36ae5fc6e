// kslab: a numerical laboratory for radial aggregation-diffusion dynamics.
// SPDX-License-Identifier: MIT
//
// Reference values in this file were computed independently with 40-digit
// arithmetic (mpmath); the generator script lives in tests/oracles/.
#include "kslab/specfun.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using kslab::bessel_i;
using kslab::bessel_i_scaled;
using kslab::beta_fn;
using kslab::gamma_fn;
using kslab::hyp1f1;
using kslab::hyp1f1_series;
using kslab::log_gamma_fn;
using kslab::prudnikov_lhs;
using kslab::prudnikov_rhs;
using kslab::rel_diff;

TEST(Gamma, KnownValues) {
  EXPECT_DOUBLE_EQ(gamma_fn(1.0), 1.0);
  EXPECT_NEAR(gamma_fn(0.5), 1.772453850905516027298, 1e-14);
  EXPECT_NEAR(gamma_fn(5.5), 52.34277778455352018115, 52.34 * 1e-13);
  EXPECT_NEAR(gamma_fn(10.25), 639232.5987795767942838, 639232.6 * 1e-13);
  EXPECT_NEAR(log_gamma_fn(141.5), 557.6937875691192126256, 557.7 * 1e-13);
}

TEST(Gamma, RecurrenceProperty) {
  for (double x : {0.3, 0.9, 1.7, 4.2, 11.0, 55.5}) {
    EXPECT_LE(rel_diff(gamma_fn(x + 1.0), x * gamma_fn(x)), 1e-13);
  }
}

TEST(Gamma, RejectsNonPositive) {
  EXPECT_THROW(gamma_fn(0.0), kslab::domain_error);
  EXPECT_THROW(gamma_fn(-2.5), kslab::domain_error);
  EXPECT_THROW(log_gamma_fn(0.0), kslab::domain_error);
}

TEST(Beta, KnownValues) {
  EXPECT_NEAR(beta_fn(1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(beta_fn(0.5, 0.5), M_PI, M_PI * 1e-13);
  EXPECT_NEAR(beta_fn(1.5, 0.5), 1.570796326794896619231, 1.57 * 1e-12);
  EXPECT_NEAR(beta_fn(2.25, 3.75), 0.04176049636696706555423, 0.0418 * 1e-12);
  // B(1.5, 1) = int_0^1 s^{1/2} ds = 2/3.
  EXPECT_NEAR(beta_fn(1.5, 1.0), 2.0 / 3.0, 1e-13);
}

TEST(Beta, SymmetryAndRejection) {
  EXPECT_DOUBLE_EQ(beta_fn(2.5, 7.0), beta_fn(7.0, 2.5));
  EXPECT_THROW(beta_fn(0.0, 1.0), kslab::domain_error);
  EXPECT_THROW(beta_fn(1.0, -1.0), kslab::domain_error);
}

struct BesselRef {
  double nu, x, value, scaled;
};

// Independent 40-digit series summation; spans both evaluation regimes and
// the crossover at x = 30.
const std::vector<BesselRef> kBesselRefs = {
    {0, 0.1, 1.0025015629340956014, 0.9071009257823010964357},
    {0, 1, 1.266065877752008335598, 0.4657596075936404365019},
    {0, 30, 781672297823.9774897174, 0.07314594648223729392892},
    {0.5, 1, 0.9376748882454876467173, 0.3449513138882446259894},
    {1, 2.5, 2.516716245288698441528, 0.2065846495312665542146},
    {1.5, 10, 2500.906154942117849713, 0.1135409637769382077421},
    {2, 29, 272697727776.9836378444, 0.06936518422640569780527},
    {2, 31, 1957319560343.867361166, 0.06738027780444282113914},
    {2.5, 35, 98045254420262.33674913, 0.06181867768980717547458},
    {3.7, 14.2, 95459.41673507580085694, 0.06498859282392586568921},
    {5, 50, 227854830791128189603.3, 0.04394749702462327080007},
    {0.75, 200, 2.036813682775809123453e+85, 0.02818739381203305365826}};

TEST(BesselI, ReferenceTable) {
  for (const auto& r : kBesselRefs) {
    EXPECT_LE(rel_diff(bessel_i(r.nu, r.x), r.value), 1e-10)
        << "nu=" << r.nu << " x=" << r.x;
    EXPECT_LE(rel_diff(bessel_i_scaled(r.nu, r.x), r.scaled), 1e-10)
        << "nu=" << r.nu << " x=" << r.x;
  }
}

TEST(BesselI, ClosedFormHalfOrder) {
  // I_{1/2}(x) = sqrt(2/(pi x)) sinh x.
  for (double x : {0.2, 1.0, 7.5, 20.0}) {
    const double exact = std::sqrt(2.0 / (M_PI * x)) * std::sinh(x);
    EXPECT_LE(rel_diff(bessel_i(0.5, x), exact), 1e-12);
  }
}

TEST(BesselI, OriginValues) {
  EXPECT_DOUBLE_EQ(bessel_i(0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(bessel_i(2.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(bessel_i_scaled(0.0, 0.0), 1.0);
}

TEST(BesselI, ThreeTermRecurrence) {
  // I_{nu-1}(x) - I_{nu+1}(x) = (2 nu / x) I_nu(x); checked on the scaled
  // variant (the common factor e^{-x} cancels) across both regimes.
  for (double nu : {1.0, 1.5, 2.0, 3.0}) {
    for (double x = 0.1; x <= 50.0; x *= 1.45) {
      const double lhs =
          bessel_i_scaled(nu - 1.0, x) - bessel_i_scaled(nu + 1.0, x);
      const double rhs = (2.0 * nu / x) * bessel_i_scaled(nu, x);
      EXPECT_LE(rel_diff(lhs, rhs), 1e-9) << "nu=" << nu << " x=" << x;
    }
  }
}

// The two evaluation algorithms (ascending series, large-argument expansion)
// must agree wherever both are trusted, checked at identical arguments.  A
// two-point comparison across the switch would be bounded below by the
// function's own derivative (~x^-1/2 decay gives ~3e-8 over a 2e-6 gap), so
// both branches are evaluated at the same x instead.
TEST(BesselI, BranchesAgreeAtSameArgument) {
  for (double nu : {0.0, 1.0, 2.5, 5.0}) {
    for (double x : {25.0, 30.0, 33.0}) {
      const double series = std::exp(nu * std::log(0.5 * x) - x) *
                            kslab::specfun_detail::bessel_i_reduced_series(nu, x);
      const double asym =
          kslab::specfun_detail::bessel_i_asymptotic_factor(nu, x) /
          std::sqrt(2.0 * M_PI * x);
      EXPECT_LE(rel_diff(series, asym), 1e-13) << "nu=" << nu << " x=" << x;
    }
  }
  // Public API: adjacent points across the switch agree to the level set by
  // the function's derivative over that gap.
  for (double nu : {0.0, 1.0, 2.5}) {
    const double below = bessel_i_scaled(nu, 29.999999);
    const double above = bessel_i_scaled(nu, 30.000001);
    EXPECT_LE(rel_diff(below, above), 1e-7) << "nu=" << nu;
  }
}

TEST(BesselI, OverflowSignalledAndScaledSurvives) {
  EXPECT_THROW(bessel_i(0.0, 800.0), kslab::numerical_error);
  const double s = bessel_i_scaled(0.0, 800.0);
  EXPECT_TRUE(std::isfinite(s));
  EXPECT_NEAR(s, 1.0 / std::sqrt(2.0 * M_PI * 800.0), 1e-3 * s);
}

TEST(BesselI, RejectsOutOfDomain) {
  EXPECT_THROW(bessel_i(-1.0, 1.0), kslab::domain_error);
  EXPECT_THROW(bessel_i(1.0, -1.0), kslab::domain_error);
}

TEST(BesselI, LnReducedConsistency) {
  for (const auto& r : kBesselRefs) {
    if (r.x <= 0.0) continue;
    const double ln_red = kslab::ln_bessel_i_reduced(r.nu, r.x);
    const double reconstructed =
        std::exp(ln_red + r.nu * std::log(0.5 * r.x) - r.x);
    EXPECT_LE(rel_diff(reconstructed, r.scaled), 1e-10)
        << "nu=" << r.nu << " x=" << r.x;
  }
}

struct HypRef {
  double a, b, z, value;
};

const std::vector<HypRef> kHypRefs = {
    {1.5, 2.0, 2.7, 9.069314013647236662922},
    {1.5, 2.0, 12.5, 83870.26057740282765697},
    {0.25, 1.25, 0.5, 1.115657964654973518578},
    {0.5, 3.0, -8.0, 0.4845452077181568120428},
    {2.75, 4.5, 30.0, 181168191674.5860633965},
    {6.0, 19.5, -25.0, 0.004765815640809548772424},
    {0.1, 0.35, 3.0, 5.143221428628238438686},
    {9.5, 10.0, 1.0e-3, 1.000950453553964748029}};

TEST(Hyp1F1, ReferenceTable) {
  for (const auto& r : kHypRefs) {
    EXPECT_LE(rel_diff(hyp1f1(r.a, r.b, r.z), r.value), 1e-10)
        << "a=" << r.a << " b=" << r.b << " z=" << r.z;
    EXPECT_LE(rel_diff(hyp1f1_series(r.a, r.b, r.z), r.value), 1e-10)
        << "series a=" << r.a << " b=" << r.b << " z=" << r.z;
  }
}

TEST(Hyp1F1, NormalizationAtZero) {
  EXPECT_NEAR(hyp1f1(0.7, 1.9, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(hyp1f1(3.0, 11.0, 0.0), 1.0, 1e-12);
}

TEST(Hyp1F1, ClosedFormOneTwo) {
  // 1F1(1;2;z) = (e^z - 1)/z.
  for (double z : {-8.0, -0.5, 0.3, 2.7, 12.5}) {
    const double exact = std::expm1(z) / z;
    EXPECT_LE(rel_diff(hyp1f1(1.0, 2.0, z), exact), 1e-11) << "z=" << z;
  }
}

TEST(Hyp1F1, IntegralMatchesSeriesAcrossDomain) {
  // 0 < a < b <= 20, |z| <= 30, including endpoint exponents in (-1,0) on
  // both ends of the integral.
  const double zs[] = {-30.0, -5.0, -0.5, 0.5, 10.0, 30.0};
  const double as[] = {0.1, 0.5, 1.5, 3.0, 7.0, 12.0};
  const double gaps[] = {0.1, 0.5, 2.0, 8.0};
  for (double a : as) {
    for (double gap : gaps) {
      const double b = a + gap;
      if (b > 20.0) continue;
      for (double z : zs) {
        const double vi = hyp1f1(a, b, z);
        const double vs = hyp1f1_series(a, b, z);
        EXPECT_LE(rel_diff(vi, vs), 1e-9)
            << "a=" << a << " b=" << b << " z=" << z;
      }
    }
  }
}

TEST(Hyp1F1, RejectsOutsideIntegralDomain) {
  EXPECT_THROW(hyp1f1(0.0, 1.0, 1.0), kslab::domain_error);
  EXPECT_THROW(hyp1f1(-0.5, 1.0, 1.0), kslab::domain_error);
  EXPECT_THROW(hyp1f1(2.0, 2.0, 1.0), kslab::domain_error);
  EXPECT_THROW(hyp1f1(3.0, 2.5, 1.0), kslab::domain_error);
}

struct MomentRef {
  double beta, nu, p, q, value;
};

const std::vector<MomentRef> kMomentRefs = {
    {4, 1.5, 1, 2, 1.793265814193146221306},
    {0.5, 0.75, 1, 1, 0.5087237134844390691197},
    {2, 0, 0.5, 3, 90.01713130052181355012},
    {1.2, 2.2, 2, 4, 0.860138087987308663384},
    {3.5, 0.5, 1.5, 0.2, 0.0800020708495218750219}};

TEST(GaussianBesselMoment, ReferenceTable) {
  for (const auto& r : kMomentRefs) {
    EXPECT_LE(rel_diff(prudnikov_lhs(r.beta, r.nu, r.p, r.q), r.value), 1e-9)
        << "beta=" << r.beta << " nu=" << r.nu;
  }
}

TEST(GaussianBesselMoment, MatchesClosedFormOnSample) {
  // The headline identity at a point where the closed form needs the series
  // evaluation (its 1F1 parameters fall outside the integral domain) ...
  EXPECT_LE(rel_diff(prudnikov_lhs(4.0, 1.5, 1.0, 2.0),
                     prudnikov_rhs(4.0, 1.5, 1.0, 2.0)),
            1e-8);
  // ... and at one where the integral representation applies.
  EXPECT_LE(rel_diff(prudnikov_lhs(3.0, 0.5, 2.0, 1.0),
                     prudnikov_rhs(3.0, 0.5, 2.0, 1.0)),
            1e-8);
}

TEST(GaussianBesselMoment, IdentityOnParameterGrid) {
  for (double beta : {0.5, 1.2, 2.0, 3.5}) {
    for (double nu : {0.0, 0.75, 2.2}) {
      for (double p : {0.5, 1.5}) {
        for (double q : {0.2, 2.0}) {
          EXPECT_LE(rel_diff(prudnikov_lhs(beta, nu, p, q),
                             prudnikov_rhs(beta, nu, p, q)),
                    1e-8)
              << beta << " " << nu << " " << p << " " << q;
        }
      }
    }
  }
}

TEST(GaussianBesselMoment, SmallQGaussianMomentLimit) {
  // q -> 0+ with nu = 0: the moment tends to (1/2) p^{-beta/2} Gamma(beta/2).
  const double beta = 3.0, p = 2.0;
  const double limit = 0.5 * std::pow(p, -0.5 * beta) * gamma_fn(0.5 * beta);
  EXPECT_LE(rel_diff(prudnikov_lhs(beta, 0.0, p, 1e-8), limit), 1e-7);
}

TEST(GaussianBesselMoment, DivergenceFlagged) {
  EXPECT_THROW(prudnikov_lhs(-0.5, 0.5, 1.0, 1.0), kslab::domain_error);
  EXPECT_THROW(prudnikov_lhs(1.0, 1.0, 0.0, 1.0), kslab::domain_error);
  EXPECT_THROW(prudnikov_lhs(1.0, 1.0, 1.0, -1.0), kslab::domain_error);
  EXPECT_THROW(prudnikov_lhs(1.0, -0.5, 1.0, 1.0), kslab::domain_error);
}

}  // namespace
