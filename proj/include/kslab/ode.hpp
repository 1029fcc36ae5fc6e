// kslab: a numerical laboratory for radial aggregation-diffusion dynamics.
// SPDX-License-Identifier: MIT
//
// Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4), FSAL) with
// exact stepping onto requested output abscissae.  Used by the profile module
// to integrate the self-similar ODE from its near-origin series data; the
// embedded fourth-order solution drives the step-size controller.
#ifndef KSLAB_ODE_HPP
#define KSLAB_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "kslab/common.hpp"

namespace kslab {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-6;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
  // Accepted states whose max-norm exceeds the cap raise blowup_error with
  // the abscissa reached; callers use it as one-sided bracket information.
  double value_cap = 1e30;
};

// Dormand-Prince 5(4): seven stages, first-same-as-last, fifth-order
// propagation with an embedded fourth-order error estimate.
template <std::size_t N, class RHS>
class AdaptiveRk45 {
 public:
  using State = std::array<double, N>;

  AdaptiveRk45(RHS rhs, double x0, const State& y0, OdeOptions opts = {})
      : rhs_(rhs), opts_(opts), x_(x0), y_(y0) {
    if (!(opts_.rel_tol > 0.0) || !(opts_.abs_tol > 0.0))
      throw domain_error("AdaptiveRk45: tolerances must be positive");
    h_ = std::min(opts_.initial_step, opts_.max_step);
    k1_ = rhs_(x_, y_);
  }

  double x() const { return x_; }
  const State& state() const { return y_; }
  long steps_taken() const { return steps_; }

  // Integrates forward until x() == target exactly (the final step is
  // clipped to land on it); target must not be behind the current abscissa.
  void advance_to(double target) {
    if (target < x_)
      throw domain_error("AdaptiveRk45: target precedes current abscissa");
    while (x_ < target) {
      const bool clipped = h_ >= target - x_;
      const double h_try = clipped ? (target - x_) : h_;
      attempt_step(h_try, clipped);
    }
  }

 private:
  void attempt_step(double h, bool clipped) {
    if (++steps_ > opts_.max_steps)
      throw numerical_error("AdaptiveRk45: step budget exhausted");
    if (!(h > min_step_floor()))
      throw numerical_error("AdaptiveRk45: step size underflow");

    const State k2 = rhs_(x_ + c2 * h, blend<1>(h, {a21}));
    const State k3 = rhs_(x_ + c3 * h, blend<2>(h, {a31, a32}, k2));
    const State k4 = rhs_(x_ + c4 * h, blend<3>(h, {a41, a42, a43}, k2, k3));
    const State k5 =
        rhs_(x_ + c5 * h, blend<4>(h, {a51, a52, a53, a54}, k2, k3, k4));
    const State k6 = rhs_(
        x_ + h, blend<5>(h, {a61, a62, a63, a64, a65}, k2, k3, k4, k5));

    State y_new;
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y_[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] +
                              b5 * k5[i] + b6 * k6[i]);
    const State k7 = rhs_(x_ + h, y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] +
                            e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          opts_.abs_tol +
          opts_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / scale);
    }

    if (err <= 1.0 || std::abs(h) <= 2.0 * min_step_floor()) {
      x_ += h;
      y_ = y_new;
      k1_ = k7;  // FSAL
      double peak = 0.0;
      for (const double v : y_) {
        if (!std::isfinite(v))
          throw blowup_error("ode state is not finite", x_, v);
        peak = std::max(peak, std::abs(v));
      }
      if (peak > opts_.value_cap)
        throw blowup_error("ode state exceeded the configured cap", x_, peak);
      // Grow the *proposal*, not a clipped landing step.
      const double factor =
          std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      const double grown = h * factor;
      h_ = std::min(clipped ? std::max(h_, grown) : grown, opts_.max_step);
    } else {
      const double factor =
          std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      h_ = h * factor;
    }
  }

  double min_step_floor() const {
    return 16.0 * std::numeric_limits<double>::epsilon() *
           std::max(1.0, std::abs(x_));
  }

  // y + h * sum(coef_j * k_j) over the first M stages (k1 plus extras).
  template <std::size_t M, class... Ks>
  State blend(double h, const std::array<double, M>& coef,
              const Ks&... extras) const {
    static_assert(sizeof...(Ks) == M - 1);
    const std::array<const State*, M> ks = {&k1_, &extras...};
    State out;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < M; ++j) acc += coef[j] * (*ks[j])[i];
      out[i] = y_[i] + h * acc;
    }
    return out;
  }

  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                          c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                          a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                          b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                          b6 = 11.0 / 84.0;
  // b - b*: difference against the embedded fourth-order weights.
  static constexpr double e1 = b1 - 5179.0 / 57600.0;
  static constexpr double e3 = b3 - 7571.0 / 16695.0;
  static constexpr double e4 = b4 - 393.0 / 640.0;
  static constexpr double e5 = b5 + 92097.0 / 339200.0;
  static constexpr double e6 = b6 - 187.0 / 2100.0;
  static constexpr double e7 = -1.0 / 40.0;

  RHS rhs_;
  OdeOptions opts_;
  double x_;
  State y_;
  State k1_;
  double h_ = 0.0;
  long steps_ = 0;
};

}  // namespace kslab

#endif  // KSLAB_ODE_HPP
