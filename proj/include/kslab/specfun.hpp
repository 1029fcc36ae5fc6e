// kslab: a numerical laboratory for radial aggregation-diffusion dynamics.
// SPDX-License-Identifier: MIT
//
// Special-function kernel layer: Gamma/Beta, the modified Bessel function
// I_nu, the confluent hypergeometric function 1F1 through its Euler integral
// representation, and the Gaussian-weighted Bessel moment that ties them
// together.
#ifndef KSLAB_SPECFUN_HPP
#define KSLAB_SPECFUN_HPP

#include <cmath>
#include <limits>

#include "kslab/common.hpp"
#include "kslab/quadrature.hpp"

namespace kslab {

// Gamma function for positive arguments.  Backed by the platform libm, which
// delivers better than 1e-14 relative accuracy over the range used here; the
// unit suite pins this against independently computed references.
inline double gamma_fn(double x) {
  if (!(x > 0.0)) throw domain_error("gamma_fn: requires x > 0");
  if (x > 171.6)
    throw numerical_error("gamma_fn: overflow, use log_gamma_fn instead");
  return std::tgamma(x);
}

// log Gamma for positive arguments; the large-x companion of gamma_fn.
inline double log_gamma_fn(double x) {
  if (!(x > 0.0)) throw domain_error("log_gamma_fn: requires x > 0");
  return std::lgamma(x);
}

// Euler Beta function B(x,y) = Gamma(x)Gamma(y)/Gamma(x+y).
inline double beta_fn(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw domain_error("beta_fn: requires x > 0 and y > 0");
  if (x + y < 170.0) return std::tgamma(x) * std::tgamma(y) / std::tgamma(x + y);
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

namespace specfun_detail {

// Ascending series of the "reduced" Bessel function
//   Itilde_nu(x) = I_nu(x) / (x/2)^nu = sum_m (x/2)^{2m} / (m! Gamma(m+nu+1)),
// which is finite and positive at x = 0.  All terms are positive, so there is
// no cancellation; used below the series/asymptotic crossover.
inline double bessel_i_reduced_series(double nu, double x) {
  double term = 1.0 / std::tgamma(nu + 1.0);
  if (nu + 1.0 > 171.0) term = std::exp(-std::lgamma(nu + 1.0));
  const double q = 0.25 * x * x;
  double sum = term;
  for (int m = 0; m < 500; ++m) {
    term *= q / ((m + 1.0) * (m + 1.0 + nu));
    sum += term;
    if (term < 1e-17 * sum) return sum;
  }
  throw numerical_error("bessel_i: series did not converge");
}

// Large-argument asymptotic sum for e^{-x} I_nu(x) * sqrt(2 pi x):
//   1 - (mu-1)/(8x) + (mu-1)(mu-9)/(2!(8x)^2) - ...,  mu = 4 nu^2.
// The series is divergent; summation stops at the smallest term, whose size
// bounds the truncation error.  At the crossover x = 30 the smallest term is
// below 1e-12 for nu <= 7, the range this library needs.
inline double bessel_i_asymptotic_factor(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  double prev_mag = std::numeric_limits<double>::max();
  for (int k = 1; k <= 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    const double mag = std::abs(term);
    if (mag >= prev_mag) break;  // divergence onset: stop before it
    sum += term;
    prev_mag = mag;
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

inline constexpr double bessel_series_cutoff = 30.0;

}  // namespace specfun_detail

// Exponentially scaled modified Bessel function e^{-x} I_nu(x), finite for
// every x >= 0; the overflow-free companion of bessel_i.
inline double bessel_i_scaled(double nu, double x) {
  if (!(nu >= 0.0) || !(x >= 0.0))
    throw domain_error("bessel_i_scaled: requires nu >= 0 and x >= 0");
  if (x <= specfun_detail::bessel_series_cutoff) {
    if (x == 0.0) return (nu == 0.0) ? 1.0 : 0.0;
    const double red = specfun_detail::bessel_i_reduced_series(nu, x);
    return std::exp(nu * std::log(0.5 * x) - x) * red;
  }
  return specfun_detail::bessel_i_asymptotic_factor(nu, x) /
         std::sqrt(2.0 * M_PI * x);
}

// Modified Bessel function of the first kind, I_nu(x).
inline double bessel_i(double nu, double x) {
  if (!(nu >= 0.0) || !(x >= 0.0))
    throw domain_error("bessel_i: requires nu >= 0 and x >= 0");
  if (x <= specfun_detail::bessel_series_cutoff) {
    if (x == 0.0) return (nu == 0.0) ? 1.0 : 0.0;
    const double red = specfun_detail::bessel_i_reduced_series(nu, x);
    return std::exp(nu * std::log(0.5 * x)) * red;
  }
  const double ln_val =
      x + std::log(specfun_detail::bessel_i_asymptotic_factor(nu, x) /
                   std::sqrt(2.0 * M_PI * x));
  if (ln_val > 709.0)
    throw numerical_error(
        "bessel_i: result exceeds double range, use bessel_i_scaled");
  return std::exp(ln_val);
}

// ln of the reduced function Itilde_nu(x) = I_nu(x)/(x/2)^nu.  Defined for
// all x >= 0 with no overflow for x up to ~700; the building block for
// log-space evaluation of Gaussian-weighted Bessel integrands.
inline double ln_bessel_i_reduced(double nu, double x) {
  if (!(nu >= 0.0) || !(x >= 0.0))
    throw domain_error("ln_bessel_i_reduced: requires nu >= 0 and x >= 0");
  if (x <= specfun_detail::bessel_series_cutoff)
    return std::log(specfun_detail::bessel_i_reduced_series(nu, x));
  return x - nu * std::log(0.5 * x) +
         std::log(specfun_detail::bessel_i_asymptotic_factor(nu, x) /
                  std::sqrt(2.0 * M_PI * x));
}

// Kummer series sum_m (a)_m z^m / ((b)_m m!), convergent for all z.
// For z < 0 with b > a the Kummer transform 1F1(a;b;z) = e^z 1F1(b-a;b;-z)
// turns the alternating series into an all-positive one, avoiding the
// exponentially large cancellation of the direct sum.  Serves as the
// cross-check oracle for the integral representation and as the evaluer for
// parameters outside the integral's 0 < a < b domain.
inline double hyp1f1_series(double a, double b, double z) {
  if (!(b > 0.0)) throw domain_error("hyp1f1_series: requires b > 0");
  if (z < 0.0 && b - a > 0.0)
    return std::exp(z) * hyp1f1_series(b - a, b, -z);
  double term = 1.0, sum = 1.0;
  for (int m = 0; m < 10000; ++m) {
    term *= (a + m) * z / ((b + m) * (m + 1.0));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) return sum;
  }
  throw numerical_error("hyp1f1_series: did not converge");
}

// Confluent hypergeometric function 1F1(a;b;z) through the Euler integral
//   Gamma(b)/(Gamma(a)Gamma(b-a)) * int_0^1 s^{a-1} (1-s)^{b-a-1} e^{zs} ds,
// valid for 0 < a < b.  Both endpoint exponents may lie in (-1,0); the
// double-exponential rule absorbs them.  For z > 0 the factor e^{z(s-1)} is
// used with e^z pulled outside, so the integrand never overflows even when
// z is large.
// e^{-z} 1F1(a;b;z) for z >= 0, computed from the folded Euler integral
//   (1/B(a,b-a)) int_0^1 s^{a-1} (1-s)^{b-a-1} e^{-z(1-s)} ds,
// whose integrand lies in [0,1] times the endpoint weights for every z >= 0.
// This variant never overflows, no matter how large z is, and is the form
// consumed by the drift-barrier evaluator where z = r^2/4t can reach 1e5+.
inline double hyp1f1_scaled(double a, double b, double z,
                            const QuadratureSpec& quad = {}) {
  if (!(a > 0.0) || !(b > a))
    throw domain_error(
        "hyp1f1_scaled: integral representation requires 0 < a < b");
  if (!(z >= 0.0)) throw domain_error("hyp1f1_scaled: requires z >= 0");
  // The kernel integral can be many orders of magnitude below 1 (its scale
  // is Beta(a,b-a) e^{-z} after unfolding), so an absolute tolerance of
  // everyday size would stop refinement while the relative error is still
  // large.  Accuracy here is a relative contract: floor the absolute
  // tolerance out of the way.
  QuadratureSpec qspec = quad;
  qspec.abs_tol = std::numeric_limits<double>::min();
  const double gap = b - a;
  double J;
  if (gap < 0.6 && a > 1.0) {
    // As b-a -> 0 the endpoint factor (1-s)^{b-a-1} approaches the
    // non-integrable exponent -1, and a tail carrying a finite fraction of
    // the integral sinks below the smallest representable distance to the
    // endpoint -- no quadrature rule in double precision can see it.  One
    // integration by parts against d/ds[-(1-s)^{b-a}/(b-a)] removes the
    // singular factor exactly (boundary terms vanish for a > 1):
    //   J = (1/(b-a)) int_0^1 (1-s)^{b-a} s^{a-2} ((a-1) + z s)
    //                         e^{-z(1-s)} ds.
    J = integrate_or_throw(
            [&](double, double da, double db) {
              return std::pow(db, gap) * std::pow(da, a - 2.0) *
                     ((a - 1.0) + z * da) * std::exp(-z * db);
            },
            0.0, 1.0, qspec) /
        gap;
  } else {
    J = integrate_or_throw(
        [&](double, double da, double db) {
          return std::pow(da, a - 1.0) * std::pow(db, gap - 1.0) *
                 std::exp(-z * db);
        },
        0.0, 1.0, qspec);
  }
  return J / beta_fn(a, gap);
}

inline double hyp1f1(double a, double b, double z,
                     const QuadratureSpec& quad = {}) {
  if (!(a > 0.0) || !(b > a))
    throw domain_error("hyp1f1: integral representation requires 0 < a < b");
  if (z >= 0.0) {
    if (z > 690.0)
      throw numerical_error("hyp1f1: e^z overflows double range");
    return std::exp(z) * hyp1f1_scaled(a, b, z, quad);
  }
  // Same absolute-tolerance flooring as the scaled branch.
  QuadratureSpec qspec = quad;
  qspec.abs_tol = std::numeric_limits<double>::min();
  const double J = integrate_or_throw(
      [&](double, double da, double db) {
        return std::pow(da, a - 1.0) * std::pow(db, b - a - 1.0) *
               std::exp(z * da);
      },
      0.0, 1.0, qspec);
  return J / beta_fn(a, b - a);
}

// Gaussian-weighted Bessel moment  int_0^inf s^{beta-1} e^{-p s^2} I_nu(qs) ds
// for p, q > 0.  The integrand is evaluated entirely in log space,
//   exp((beta+nu-1) ln s + nu ln(q/2) + ln Itilde_nu(qs) - p s^2),
// so that the s^{beta+nu-1} endpoint factor and the exponentially growing
// Bessel factor never overflow individually.  The integral is truncated at a
// point where an analytic majorant (I_nu(y) <= e^y / Gamma(nu+1) times the
// reduced power) bounds the remaining tail below 0.5% of the requested
// tolerance; the truncation point doubles until that certificate holds.
inline double prudnikov_lhs(double beta, double nu, double p, double q,
                            const QuadratureSpec& quad = {}) {
  if (!(p > 0.0) || !(q > 0.0))
    throw domain_error("prudnikov_lhs: requires p > 0 and q > 0");
  if (!(nu >= 0.0)) throw domain_error("prudnikov_lhs: requires nu >= 0");
  if (!(beta + nu > 0.0))
    throw domain_error("prudnikov_lhs: divergent, requires beta + nu > 0");

  const double nu_ln_q2 = nu * std::log(0.5 * q);
  auto ln_integrand = [&](double s) {
    return (beta + nu - 1.0) * std::log(s) + nu_ln_q2 +
           ln_bessel_i_reduced(nu, q * s) - p * s * s;
  };

  // Singular-capable rule near the origin where the integrand ~ s^{beta+nu-1}.
  const double s1 = std::max(2.0, 2.0 * q / p);
  const double core = integrate_or_throw(
      [&](double, double da, double) { return std::exp(ln_integrand(da)); },
      0.0, s1, quad);

  // Extend outward until the analytic tail certificate is satisfied.  Beyond
  // s_star the log-majorant (beta+nu-1) ln s + qs - p s^2 - ln Gamma(nu+1)
  // decreases faster than p*s_star per unit length, giving
  //   tail <= majorant(s_star) / (p * s_star).
  double total = core;
  double s_lo = s1;
  double s_star = 2.0 * s1;
  const double lgnu = std::lgamma(nu + 1.0);
  for (int iter = 0; iter < 60; ++iter) {
    total += integrate_or_throw(
        [&](double s, double, double) { return std::exp(ln_integrand(s)); },
        s_lo, s_star, quad);
    const double ln_major = (beta + nu - 1.0) * std::log(s_star) + nu_ln_q2 +
                            q * s_star - lgnu - p * s_star * s_star;
    const double tol =
        std::max(quad.abs_tol, quad.rel_tol * std::abs(total));
    const bool decreasing =
        (beta + nu - 1.0) / s_star + q - 2.0 * p * s_star < -p * s_star;
    if (decreasing && std::exp(ln_major) / (p * s_star) < 0.005 * tol)
      return total;
    s_lo = s_star;
    s_star *= 2.0;
  }
  throw numerical_error("prudnikov_lhs: tail certificate not reached");
}

// Closed form the moment must equal:
//   q^nu / (2^{nu+1} p^{(beta+nu)/2}) * Gamma((beta+nu)/2)/Gamma(nu+1)
//     * 1F1((beta+nu)/2; nu+1; q^2/(4p)).
// The 1F1 factor goes through the integral representation whenever its
// parameters lie in the 0 < a < b domain and through the Kummer series
// otherwise (the identity itself holds for all beta + nu > 0).
inline double prudnikov_rhs(double beta, double nu, double p, double q,
                            const QuadratureSpec& quad = {}) {
  if (!(p > 0.0) || !(q > 0.0))
    throw domain_error("prudnikov_rhs: requires p > 0 and q > 0");
  if (!(nu >= 0.0)) throw domain_error("prudnikov_rhs: requires nu >= 0");
  if (!(beta + nu > 0.0))
    throw domain_error("prudnikov_rhs: requires beta + nu > 0");
  const double a = 0.5 * (beta + nu), b = nu + 1.0, z = q * q / (4.0 * p);
  const double ln_pref = nu * std::log(q) - (nu + 1.0) * std::log(2.0) -
                         a * std::log(p) + std::lgamma(a) - std::lgamma(b);
  const double f =
      (a < b) ? hyp1f1(a, b, z, quad) : hyp1f1_series(a, b, z);
  return std::exp(ln_pref) * f;
}

}  // namespace kslab

#endif  // KSLAB_SPECFUN_HPP
