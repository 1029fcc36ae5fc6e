// kslab: a numerical laboratory for radial aggregation-diffusion dynamics.
// SPDX-License-Identifier: MIT
//
// Shape-preserving cubic Hermite interpolation (PCHIP, Fritsch-Carlson node
// slopes).  Used wherever a sampled radial field must be read off between
// grid nodes without introducing spurious oscillation: scaling verification,
// profile extraction, and the density-equation residual all interpolate
// monotone mass data, where a plain cubic spline could overshoot.
#ifndef KSLAB_INTERP_HPP
#define KSLAB_INTERP_HPP

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "kslab/common.hpp"

namespace kslab {

// Piecewise-cubic Hermite interpolant whose node slopes are the weighted
// harmonic means of adjacent secants (zero at local extrema of the data), so
// the interpolant is monotone on every interval where the data are monotone
// and never overshoots the local data range.
class PchipInterpolant {
 public:
  PchipInterpolant(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw domain_error(
          "PchipInterpolant: need >= 2 nodes and matching value count");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw domain_error(
            "PchipInterpolant: abscissae must be strictly increasing");

    std::vector<double> h(n - 1), sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      sec[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    if (n == 2) {
      m_[0] = m_[1] = sec[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        // Slope is zero at local extrema (secant sign change or flat spot);
        // otherwise the weighted harmonic mean of the two secants, with
        // weights biased toward the shorter interval.
        if (sec[i - 1] == 0.0 || sec[i] == 0.0 ||
            (sec[i - 1] > 0.0) != (sec[i] > 0.0)) {
          m_[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          m_[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
        }
      }
      m_[0] = edge_slope(h[0], h[1], sec[0], sec[1]);
      m_[n - 1] = edge_slope(h[n - 2], h[n - 3], sec[n - 2], sec[n - 3]);
    }
  }

  double operator()(double xq) const { return eval(xq).first; }
  double derivative(double xq) const { return eval(xq).second; }

  // Exact integral of the piecewise cubic over [a, b] within the data range.
  double integrate(double a, double b) const {
    if (b < a) return -integrate(b, a);
    if (!(a >= x_.front()) || !(b <= x_.back()))
      throw domain_error("PchipInterpolant: integration outside data range");
    double total = 0.0;
    std::size_t i = locate(a);
    while (true) {
      const double cell_hi = x_[i + 1];
      const double lo = std::max(a, x_[i]);
      const double hi = std::min(b, cell_hi);
      if (hi > lo) total += cell_integral(i, lo, hi);
      if (b <= cell_hi || i + 2 >= x_.size()) break;
      ++i;
    }
    return total;
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  // One-sided three-point end slope, clipped so the end interval stays
  // shape-preserving.
  static int sgn(double v) { return (v > 0.0) - (v < 0.0); }

  static double edge_slope(double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (sgn(d) != sgn(s0)) return 0.0;
    if (sgn(s0) != sgn(s1) && std::abs(d) > 3.0 * std::abs(s0))
      return 3.0 * s0;
    return d;
  }

  // Index of the interval [x_i, x_{i+1}] containing xq (clamped at the ends).
  std::size_t locate(double xq) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    return i;
  }

  // Integral of the Hermite cubic on cell i over [lo, hi] via the exact
  // antiderivatives of the four basis polynomials in the local coordinate.
  double cell_integral(std::size_t i, double lo, double hi) const {
    const double h = x_[i + 1] - x_[i];
    const auto basis = [&](double xq) {
      const double u = (xq - x_[i]) / h;
      const double u2 = u * u, u3 = u2 * u, u4 = u2 * u2;
      const double i00 = 0.5 * u4 - u3 + u;
      const double i10 = 0.25 * u4 - (2.0 / 3.0) * u3 + 0.5 * u2;
      const double i01 = -0.5 * u4 + u3;
      const double i11 = 0.25 * u4 - u3 / 3.0;
      return h * (i00 * y_[i] + i10 * h * m_[i] + i01 * y_[i + 1] +
                  i11 * h * m_[i + 1]);
    };
    return basis(hi) - basis(lo);
  }

  std::pair<double, double> eval(double xq) const {
    if (!(xq >= x_.front()) || !(xq <= x_.back()))
      throw domain_error("PchipInterpolant: query outside data range");
    const std::size_t i = locate(xq);

    const double h = x_[i + 1] - x_[i];
    const double u = (xq - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    const double value = h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] +
                         h11 * h * m_[i + 1];
    const double dh00 = (6.0 * u2 - 6.0 * u) / h;
    const double dh10 = 3.0 * u2 - 4.0 * u + 1.0;
    const double dh01 = (-6.0 * u2 + 6.0 * u) / h;
    const double dh11 = 3.0 * u2 - 2.0 * u;
    const double deriv = dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] +
                         dh11 * m_[i + 1];
    return {value, deriv};
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace kslab

#endif  // KSLAB_INTERP_HPP
