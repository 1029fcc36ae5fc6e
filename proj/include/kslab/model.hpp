// kslab: a numerical laboratory for radial aggregation-diffusion dynamics.
// SPDX-License-Identifier: MIT
//
// Problem parameters, radial grids, the singular stationary reference
// objects, truncated initial data, and the radial-concentration diagnostic.
#ifndef KSLAB_MODEL_HPP
#define KSLAB_MODEL_HPP

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "kslab/common.hpp"
#include "kslab/specfun.hpp"

namespace kslab {

// Measure of the unit sphere in dimension d: 2 pi^{d/2} / Gamma(d/2).
inline double sphere_measure(int d) {
  if (d <= 0) throw domain_error("sphere_measure: requires d >= 1");
  return 2.0 * std::pow(M_PI, 0.5 * d) / gamma_fn(0.5 * d);
}

// Dimension d >= 3, subcriticality factor epsilon in (0,1], and the derived
// sphere measure sigma_d.  epsilon = 1 is representable for exploratory runs
// but carries no construction guarantee; it is flagged as critical.
struct ModelParams {
  int d;
  double epsilon;
  double sigma_d;

  bool critical() const { return epsilon == 1.0; }
  // Above the admissible range: no existence guarantee applies; such runs
  // are diagnostic experiments expected to trip the blow-up signal.
  bool supercritical() const { return epsilon > 1.0; }
};

inline ModelParams make_params(int d, double epsilon) {
  if (d < 3) throw domain_error("ModelParams: requires d >= 3");
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw domain_error("ModelParams: requires 0 < epsilon <= 1");
  return ModelParams{d, epsilon, sphere_measure(d)};
}

// Exploratory constructor admitting epsilon > 1 (supercritical data, where
// the continuum problem can have no solution at all).  Every such object
// reports supercritical() = true and is only meant for blow-up diagnostics;
// the guarantees tested elsewhere do not apply.
inline ModelParams make_params_exploratory(int d, double epsilon) {
  if (d < 3) throw domain_error("ModelParams: requires d >= 3");
  if (!(epsilon > 0.0)) throw domain_error("ModelParams: requires epsilon > 0");
  return ModelParams{d, epsilon, sphere_measure(d)};
}

// Strictly increasing radial nodes r_0 = 0 < r_1 < ... < r_N = r_max.
struct RadialGrid {
  enum class Stretching { uniform, geometric };
  std::vector<double> nodes;
  Stretching stretching = Stretching::uniform;
  double ratio = 1.0;  // (r_{i+1}-r_i)/(r_i-r_{i-1}) for geometric grids

  std::size_t size() const { return nodes.size(); }
  double r_max() const { return nodes.back(); }
};

inline RadialGrid uniform_grid(double r_max, std::size_t n_intervals) {
  if (!(r_max > 0.0) || n_intervals < 2)
    throw domain_error("uniform_grid: requires r_max > 0 and N >= 2");
  RadialGrid g;
  g.stretching = RadialGrid::Stretching::uniform;
  g.ratio = 1.0;
  g.nodes.resize(n_intervals + 1);
  for (std::size_t i = 0; i <= n_intervals; ++i)
    g.nodes[i] = r_max * static_cast<double>(i) / static_cast<double>(n_intervals);
  g.nodes[0] = 0.0;
  g.nodes[n_intervals] = r_max;
  return g;
}

// Geometric grid stretched toward the origin: the first interval is
// first_frac * r_max (default 1e-4), and successive intervals grow by a
// constant ratio rho solved from sum_{i<N} rho^i = 1/first_frac.  Mass near
// the origin behaves like c r^d, so the origin needs most of the resolution
// while the far field is smooth.
inline RadialGrid geometric_grid(double r_max, std::size_t n_intervals,
                                 double first_frac = 1e-4) {
  if (!(r_max > 0.0) || n_intervals < 2)
    throw domain_error("geometric_grid: requires r_max > 0 and N >= 2");
  if (!(first_frac > 0.0) || !(first_frac * static_cast<double>(n_intervals) < 1.0))
    throw domain_error("geometric_grid: first interval fraction out of range");
  const double target = 1.0 / first_frac;  // sum of N ratio powers
  const auto n = static_cast<double>(n_intervals);
  // Newton iteration for rho > 1 solving (rho^N - 1)/(rho - 1) = target.
  double rho = std::pow(target * (1.0 - 1.0 / n) + 1.0 / n, 1.0 / (n - 1.0));
  for (int it = 0; it < 100; ++it) {
    double s = 0.0, ds = 0.0, pw = 1.0;
    for (std::size_t i = 0; i < n_intervals; ++i) {
      s += pw;
      if (i > 0) ds += static_cast<double>(i) * pw / rho;
      pw *= rho;
    }
    const double step = (s - target) / ds;
    rho -= step;
    if (std::abs(step) < 1e-15 * rho) break;
  }
  RadialGrid g;
  g.stretching = RadialGrid::Stretching::geometric;
  g.ratio = rho;
  g.nodes.resize(n_intervals + 1);
  g.nodes[0] = 0.0;
  double dr = first_frac * r_max;
  for (std::size_t i = 1; i <= n_intervals; ++i) {
    g.nodes[i] = g.nodes[i - 1] + dr;
    dr *= rho;
  }
  // Rescale so the last node is exactly r_max; scaling preserves the ratios.
  const double scale = r_max / g.nodes[n_intervals];
  for (auto& r : g.nodes) r *= scale;
  g.nodes[n_intervals] = r_max;
  return g;
}

// Cumulative radial mass M(t, r_i) on a grid at one instant.
struct MassField {
  std::shared_ptr<const RadialGrid> grid;
  double t = 0.0;
  std::vector<double> values;
  ModelParams params{3, 1.0, 0.0};
};

// Violation report for the MassField invariants: M(0) = 0, monotone in r,
// and the subcritical bound M <= epsilon 2 sigma_d r^{d-2}.  Violations are
// measured in the normalized variable M / (2 sigma_d r^{d-2}).
struct FieldViolations {
  double bound = 0.0;     // max positive excess of M_norm - epsilon
  double monotone = 0.0;  // max positive of (M_i - M_{i+1}) normalized
};

inline double normalization_factor(const ModelParams& p, double r) {
  return 2.0 * p.sigma_d * std::pow(r, p.d - 2);
}

inline FieldViolations check_field(const MassField& f) {
  FieldViolations v;
  const auto& r = f.grid->nodes;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double norm = normalization_factor(f.params, r[i]);
    v.bound = std::max(v.bound, f.values[i] / norm - f.params.epsilon);
    v.monotone = std::max(v.monotone, (f.values[i - 1] - f.values[i]) / norm);
  }
  return v;
}

// Cumulative mass of the singular stationary density 2(d-2)/r^2:
// M_C(r) = 2 sigma_d r^{d-2}; the normalized ratio r^{2-d} M_C is the
// r-independent constant 2 sigma_d.
inline double chandrasekhar_mass(const ModelParams& params, double r) {
  if (!(r >= 0.0)) throw domain_error("chandrasekhar_mass: requires r >= 0");
  if (r == 0.0) return 0.0;
  return 2.0 * params.sigma_d * std::pow(r, params.d - 2);
}

// Truncation level K with its derived plateau radius
// R(K) = sqrt(2(d-2) sigma_d / d) / K.
struct TruncationSpec {
  double K;
  double R_K;
};

inline TruncationSpec make_truncation(const ModelParams& params, double K) {
  if (!(K > 0.0)) throw domain_error("TruncationSpec: requires K > 0");
  const double R =
      std::sqrt(2.0 * (params.d - 2) * params.sigma_d / params.d) / K;
  return TruncationSpec{K, R};
}

// Cumulative mass of the K-truncated initial density: the density equals the
// constant plateau epsilon d K^2 / sigma_d inside R(K) and the singular
// stationary tail epsilon 2(d-2)/r^2 outside, so
//   M0K(r) = epsilon K^2 r^d                                   r <= R(K)
//   M0K(r) = epsilon 2 sigma_d r^{d-2} - epsilon (4 sigma_d/d) R(K)^{d-2}
//                                                              r >= R(K).
// The constant offset in the outer branch is exactly what continuity at
// R(K) requires; it also makes M0K <= epsilon 2 sigma_d r^{d-2} everywhere.
inline double truncated_initial_mass(const ModelParams& params,
                                     const TruncationSpec& trunc, double r) {
  if (!(r >= 0.0)) throw domain_error("truncated_initial_mass: requires r >= 0");
  if (r <= trunc.R_K)
    return params.epsilon * trunc.K * trunc.K * std::pow(r, params.d);
  const double offset = params.epsilon * (4.0 * params.sigma_d / params.d) *
                        std::pow(trunc.R_K, params.d - 2);
  return params.epsilon * 2.0 * params.sigma_d * std::pow(r, params.d - 2) -
         offset;
}

// The K-truncated initial density itself (radial profile).
inline double truncated_initial_density(const ModelParams& params,
                                        const TruncationSpec& trunc, double r) {
  if (!(r >= 0.0)) throw domain_error("truncated_initial_density: requires r >= 0");
  const double plateau =
      params.epsilon * params.d * trunc.K * trunc.K / params.sigma_d;
  if (r <= trunc.R_K) return plateau;
  return params.epsilon * 2.0 * (params.d - 2) / (r * r);
}

// Scaling-invariant size functional: max over positive grid nodes of
// r^{2-d} M(r).  Equals 2 sigma_d for the stationary reference field and is
// bounded by epsilon 2 sigma_d for any field obeying the subcritical bound.
inline double radial_concentration(const MassField& field) {
  double best = 0.0;
  const auto& r = field.grid->nodes;
  for (std::size_t i = 1; i < r.size(); ++i) {
    best = std::max(best,
                    std::pow(r[i], 2 - field.params.d) * field.values[i]);
  }
  return best;
}

// Sample the truncated initial mass onto a grid.
inline MassField initial_mass_field(const ModelParams& params,
                                    const TruncationSpec& trunc,
                                    std::shared_ptr<const RadialGrid> grid) {
  MassField f;
  f.grid = std::move(grid);
  f.t = 0.0;
  f.params = params;
  f.values.resize(f.grid->size());
  for (std::size_t i = 0; i < f.grid->size(); ++i)
    f.values[i] = truncated_initial_mass(params, trunc, f.grid->nodes[i]);
  return f;
}

}  // namespace kslab

#endif  // KSLAB_MODEL_HPP
