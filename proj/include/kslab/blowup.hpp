// SPDX-License-Identifier: MIT
//
// Nonexistence threshold for scaled singular-stationary data.
//
// The constant
//
//   C(d) = (16 / Gamma(d/2)) int_0^infty e^{-rho^2} rho^{d+1}
//                                     / (2(d-2) + 4 rho^2) d rho
//
// separates amplitudes: data eps * 2(d-2)/|x|^2 with eps > C(d) admit no
// local-in-time solution, while eps < 1 admits the self-similar solution
// constructed by the profile module.  The band 1 < eps <= C(d) is genuinely
// open and is classified as indeterminate rather than being collapsed into
// either regime.
//
// Closed-form two-sided bounds sandwich the quadrature:
//
//   1 < (2/(d-1)) (Gamma((d+1)/2)/Gamma(d/2))^2 < C(d)
//     < sqrt(2/(d-2)) Gamma((d+1)/2)/Gamma(d/2) < (d-1)/(d-2) <= 2.
//
// The lower bound is a Cauchy-Schwarz estimate, the first upper bound the
// arithmetic-geometric mean step 2(d-2) + 4 rho^2 >= 4 sqrt(2(d-2)) rho.

#ifndef KSLAB_BLOWUP_HPP
#define KSLAB_BLOWUP_HPP

#include <cmath>
#include <string>

#include "kslab/common.hpp"
#include "kslab/quadrature.hpp"

namespace kslab {

struct ThresholdResult {
  int d = 0;
  double C_value = 0.0;
  double lower_bound = 0.0;    // (2/(d-1)) (Gamma((d+1)/2)/Gamma(d/2))^2
  double upper_bound_1 = 0.0;  // sqrt(2/(d-2)) Gamma((d+1)/2)/Gamma(d/2)
  double upper_bound_2 = 0.0;  // (d-1)/(d-2)
  double quad_error = 0.0;     // quadrature error estimate on C_value
  double tail_bound = 0.0;     // analytic bound on the discarded tail
  bool chain_ok = false;       // 1 < lower < C < upper_1 < upper_2 <= 2
};

enum class Classification {
  subcritical_exists,  // eps < 1: self-similar solution exists
  critical,            // eps = 1: the stationary solution itself
  indeterminate,       // 1 < eps <= C(d): open band
  nonexistent          // eps > C(d): no local-in-time solution
};

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::subcritical_exists:
      return "subcritical-exists";
    case Classification::critical:
      return "critical";
    case Classification::indeterminate:
      return "indeterminate";
    case Classification::nonexistent:
      return "nonexistent";
  }
  return "unknown";
}

namespace blowup_detail {

inline double gamma_ratio(int d) {
  // Gamma((d+1)/2) / Gamma(d/2) via log-gamma: stable for all d.
  return std::exp(std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d));
}

inline double threshold_cutoff(int d) {
  return std::sqrt(0.5 * static_cast<double>(d)) + 12.0;
}

// Integrand of C(d) with the 16/Gamma(d/2) normalization folded into the
// exponent, so values stay representable at large d where rho^{d+1} alone
// would overflow.
inline double normalized_integrand(int d, double rho) {
  if (!(rho > 0.0)) return 0.0;
  const double dd = static_cast<double>(d);
  const double log_num = std::log(16.0) + (dd + 1.0) * std::log(rho) -
                         rho * rho - std::lgamma(0.5 * dd);
  return std::exp(log_num) / (2.0 * (dd - 2.0) + 4.0 * rho * rho);
}

// ln of an upper bound for the discarded tail, in the same C(d) units.
// For rho >= rho_star:  rho^{d+1} e^{-rho^2} / (2(d-2)+4rho^2)
//                         <= rho^{d-1} e^{-rho^2} / 4,
// and splitting e^{-rho^2} = e^{-rho^2/2} e^{-rho^2/2}, the factor
// rho^{d-1} e^{-rho^2/2} is nonincreasing beyond its maximum at
// rho = sqrt(d-1) <= rho_star, so
//   tail <= (1/4) rho_star^{d-1} e^{-rho_star^2/2}
//             * int_{rho_star}^infty e^{-s^2/2} ds
//        <= rho_star^{d-2} e^{-rho_star^2} / 4.
inline double log_tail_bound(int d, double rho_star) {
  const double dd = static_cast<double>(d);
  if (rho_star * rho_star < dd - 1.0)
    throw domain_error(
        "compute_threshold: dimension too large for the Gaussian tail "
        "majorant (requires cutoff^2 >= d-1)");
  return std::log(16.0 / 4.0) + (dd - 2.0) * std::log(rho_star) -
         rho_star * rho_star - std::lgamma(0.5 * dd);
}

inline QuadResult threshold_quadrature(int d, double rho_star,
                                       const QuadratureSpec& quad) {
  const auto r = integrate(
      [d](double rho) { return normalized_integrand(d, rho); }, 0.0, rho_star,
      quad);
  if (!r.converged)
    throw numerical_error("compute_threshold: quadrature did not converge");
  return r;
}

}  // namespace blowup_detail

inline ThresholdResult compute_threshold(int d,
                                         const QuadratureSpec& quad = {}) {
  if (d < 3) throw domain_error("compute_threshold: requires d >= 3");
  quad.validate();

  const double rho_star = blowup_detail::threshold_cutoff(d);
  const double log_tail = blowup_detail::log_tail_bound(d, rho_star);
  const double tolerance = std::max(quad.abs_tol, quad.rel_tol);
  if (log_tail > std::log(0.01 * tolerance))
    throw numerical_error(
        "compute_threshold: tail bound exceeds 1% of the quadrature "
        "tolerance");

  const QuadResult r = blowup_detail::threshold_quadrature(d, rho_star, quad);

  ThresholdResult out;
  out.d = d;
  out.C_value = r.value;
  out.quad_error = r.error;
  out.tail_bound = std::exp(log_tail);

  const double dd = static_cast<double>(d);
  const double ratio = blowup_detail::gamma_ratio(d);
  out.lower_bound = (2.0 / (dd - 1.0)) * ratio * ratio;
  out.upper_bound_1 = std::sqrt(2.0 / (dd - 2.0)) * ratio;
  out.upper_bound_2 = (dd - 1.0) / (dd - 2.0);
  out.chain_ok = 1.0 < out.lower_bound && out.lower_bound < out.C_value &&
                 out.C_value < out.upper_bound_1 &&
                 out.upper_bound_1 < out.upper_bound_2 &&
                 out.upper_bound_2 <= 2.0;
  return out;
}

inline Classification classify(int d, double eps,
                               const QuadratureSpec& quad = {}) {
  if (d < 3) throw domain_error("classify: requires d >= 3");
  if (!(eps > 0.0)) throw domain_error("classify: requires eps > 0");
  if (eps < 1.0) return Classification::subcritical_exists;
  if (eps == 1.0) return Classification::critical;
  const ThresholdResult thr = compute_threshold(d, quad);
  return eps <= thr.C_value ? Classification::indeterminate
                            : Classification::nonexistent;
}

}  // namespace kslab

#endif  // KSLAB_BLOWUP_HPP
