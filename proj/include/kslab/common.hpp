// kslab: a numerical laboratory for radial aggregation-diffusion dynamics.
// SPDX-License-Identifier: MIT
#ifndef KSLAB_COMMON_HPP
#define KSLAB_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kslab {

inline constexpr const char* version_string = "0.1.0";

// Rejected input: a precondition of an operation does not hold.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric procedure failed to deliver its result (quadrature did not
// converge, tridiagonal pivot vanished, ODE step underflow, overflow...).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Diagnostic signal: the evolving density exceeded the configured cap.  This
// is a candidate-blow-up report for supercritical experiments, not a proof.
class blowup_error : public std::runtime_error {
 public:
  blowup_error(const std::string& msg, double t, double peak)
      : std::runtime_error(msg), t_signal(t), peak_density(peak) {}
  double t_signal;
  double peak_density;
};

inline double sq(double x) { return x * x; }

// Symmetric relative difference, safe at zero.
inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

// Weights of the three-point stencils on a nonuniform grid with spacings
// hm = x_c - x_l and hp = x_r - x_c.  Both formulas are exact on quadratic
// polynomials; on smoothly stretched grids (spacing ratio 1 + O(1/N)) the
// second-derivative truncation error is O(h^2) like the uniform case.
struct StencilWeights {
  double wl, wc, wr;
};

inline StencilWeights d1_weights(double hm, double hp) {
  return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}

inline StencilWeights d2_weights(double hm, double hp) {
  return {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
}

}  // namespace kslab

#endif  // KSLAB_COMMON_HPP
