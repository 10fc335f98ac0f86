#ifndef AVGTSVD_KERNELS_HPP
#define AVGTSVD_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgtsvd/quadrature.hpp"

namespace avgtsvd {

inline constexpr double PI = 3.14159265358979323846;

/*
 * Integral kernels kappa(x,y) on [0,1]^2 for first-kind equations
 * g(x) = \int_0^1 kappa(x,y) f(y) dy, plus the benchmark solutions.
 *
 * smoothness_bound is the constant C_K = sup |d^n_x d^n'_y kappa| over
 * n+n' <= 2, which drives every quadrature-path error bound. It is computed
 * by finite differences for the smooth kernels and configured by hand where
 * the kernel is not C^2.
 */
struct Kernel {
  std::string name;
  std::function<double(double, double)> eval;
  double smoothness_bound = 0.0;  // C_K
  bool symmetric = false;
  bool volterra = false;  // kappa(x,y) = 0 for y >= x
};

/// Max of |d^n_x d^n'_y kappa|, n+n' <= 2, probed on a grid with central
/// finite differences of step h (grid points pulled inward by h so stencils
/// stay inside the domain).
inline double estimate_smoothness_bound(const std::function<double(double, double)>& k,
                                        int grid = 201, double h = 1e-4) {
  double best = 0.0;
  auto probe = [&](double x, double y) {
    const double f00 = k(x, y);
    const double fxp = k(x + h, y), fxm = k(x - h, y);
    const double fyp = k(x, y + h), fym = k(x, y - h);
    const double fpp = k(x + h, y + h), fpm = k(x + h, y - h);
    const double fmp = k(x - h, y + h), fmm = k(x - h, y - h);
    const double dx = (fxp - fxm) / (2 * h);
    const double dy = (fyp - fym) / (2 * h);
    const double dxx = (fxp - 2 * f00 + fxm) / (h * h);
    const double dyy = (fyp - 2 * f00 + fym) / (h * h);
    const double dxy = (fpp - fpm - fmp + fmm) / (4 * h * h);
    for (double v : {std::fabs(f00), std::fabs(dx), std::fabs(dy), std::fabs(dxx),
                     std::fabs(dyy), std::fabs(dxy)})
      best = std::max(best, v);
  };
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double x = std::clamp(static_cast<double>(i) / (grid - 1), h, 1.0 - h);
      const double y = std::clamp(static_cast<double>(j) / (grid - 1), h, 1.0 - h);
      probe(x, y);
    }
  return best;
}

/// kappa(x,y) = min(x(1-y), y(1-x)): the Green's function of -u'' with
/// Dirichlet ends. Only Lipschitz across the diagonal, so the C^2-based
/// bounds are not claimed for it; smoothness_bound is set to sup|kappa|-scale 1.
inline Kernel deriv2_kernel() {
  Kernel k;
  k.name = "deriv2";
  k.eval = [](double x, double y) { return std::min(x * (1.0 - y), y * (1.0 - x)); };
  k.smoothness_bound = 1.0;
  k.symmetric = true;
  return k;
}

/// kappa(s,t) = d (d^2 + (s-t)^2)^{-3/2}: point-mass gravity survey at depth d.
inline Kernel gravity_kernel(double d = 0.25) {
  if (!(d > 0.0)) throw std::invalid_argument("gravity_kernel: depth must be positive");
  Kernel k;
  k.name = "gravity";
  k.eval = [d](double s, double t) {
    const double u = s - t;
    return d / std::pow(d * d + u * u, 1.5);
  };
  k.symmetric = true;
  k.smoothness_bound = estimate_smoothness_bound(k.eval);
  return k;
}

/// Volterra heat kernel kappa(s,t) = h(s-t), h(u) = u^{-3/2}/(2 kappa sqrt(pi))
/// exp(-1/(4 kappa^2 u)) for u > 0. The u -> 0+ limit is 0 (the exponential
/// wins); u < 1e-12 returns 0 to dodge overflow in the power.
inline Kernel heat_kernel(double kappa_param = 1.0) {
  if (!(kappa_param > 0.0)) throw std::invalid_argument("heat_kernel: parameter must be positive");
  Kernel k;
  k.name = "heat";
  const double c = 1.0 / (2.0 * kappa_param * std::sqrt(PI));
  const double d = 1.0 / (4.0 * kappa_param * kappa_param);
  k.eval = [c, d](double s, double t) {
    const double u = s - t;
    if (u < 1e-12) return 0.0;
    return c * std::pow(u, -1.5) * std::exp(-d / u);
  };
  k.volterra = true;
  k.smoothness_bound = estimate_smoothness_bound(k.eval);
  return k;
}

inline const std::vector<std::string>& kernel_names() {
  static const std::vector<std::string> names = {"deriv2", "gravity", "heat"};
  return names;
}

inline Kernel make_kernel(const std::string& name) {
  if (name == "deriv2") return deriv2_kernel();
  if (name == "gravity") return gravity_kernel();
  if (name == "heat") return heat_kernel();
  throw std::invalid_argument("unknown kernel: " + name);
}

// ---------------------------------------------------------------------------

enum class SolutionKind { synthetic_spectral, grid_vector, closure };

/*
 * Exact unknowns. synthetic_spectral solutions live on the sine basis of the
 * deriv2 operator: f(x) = sum_{j<=D} c_j sqrt(2) sin(j pi x) with
 * c_j = (pi j)^{-2s}. grid_vector / closure solutions are plain callables
 * sampled wherever needed.
 */
struct TrueSolution {
  SolutionKind kind = SolutionKind::closure;
  double smoothness_s = 0.0;
  int D = 0;
  std::vector<double> coeffs;             // synthetic: c_j at [j-1]
  std::function<double(double)> profile;  // grid_vector / closure

  double operator()(double x) const {
    if (kind == SolutionKind::synthetic_spectral) {
      double acc = 0.0;
      for (int j = 1; j <= D; ++j) acc += coeffs[j - 1] * std::sin(j * PI * x);
      return std::sqrt(2.0) * acc;
    }
    return profile(x);
  }

  /// L2(0,1) norm: exact coefficient sum for synthetic solutions,
  /// reference quadrature otherwise.
  double l2_norm() const {
    if (kind == SolutionKind::synthetic_spectral) {
      double s2 = 0.0;
      for (double c : coeffs) s2 += c * c;
      return std::sqrt(s2);
    }
    return avgtsvd::l2_norm([this](double x) { return (*this)(x); });
  }

  std::vector<double> sample(const std::vector<double>& points) const {
    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i) out[i] = (*this)(points[i]);
    return out;
  }
};

/// f(x) = sum_{j<=D} (pi j)^{-2s} sqrt(2) sin(j pi x).
inline TrueSolution synthetic_solution(double s, int D) {
  if (!(s > 0.0)) throw std::invalid_argument("synthetic_solution: s must be positive");
  if (D < 1) throw std::invalid_argument("synthetic_solution: D must be >= 1");
  TrueSolution f;
  f.kind = SolutionKind::synthetic_spectral;
  f.smoothness_s = s;
  f.D = D;
  f.coeffs.resize(D);
  for (int j = 1; j <= D; ++j) f.coeffs[j - 1] = std::pow(PI * j, -2.0 * s);
  return f;
}

/// Solution known only through grid values on the midpoint grid of its
/// length: evaluated as the linear spline through (0,0), (xi_i, values_i),
/// (1,0).
inline TrueSolution grid_vector_solution(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("grid_vector_solution: empty value vector");
  TrueSolution f;
  f.kind = SolutionKind::grid_vector;
  const int m = static_cast<int>(values.size());
  f.profile = [values = std::move(values), m](double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double first = 1.0 / (2.0 * m);
    if (x <= first) return values.front() * (x / first);
    if (x >= 1.0 - first) return values.back() * ((1.0 - x) / first);
    const double pos = x * m - 0.5;
    const int i = std::min(static_cast<int>(pos), m - 2);
    return values[i] + (pos - i) * (values[i + 1] - values[i]);
  };
  return f;
}

/// Piecewise-linear gravity benchmark profile: 0 at t=0, peak 2 at t=1/3,
/// 1 at t=3/4, back to 0 at t=1.
inline TrueSolution gravity_solution() {
  TrueSolution f;
  f.kind = SolutionKind::grid_vector;
  f.profile = [](double t) {
    if (t <= 1.0 / 3.0) return 6.0 * t;
    if (t <= 0.75) return 2.0 - (t - 1.0 / 3.0) * (12.0 / 5.0);
    return 4.0 * (1.0 - t);
  };
  return f;
}

/// Heat benchmark profile: quadratic ramp, unit bump, exponential decay,
/// supported on [0, 1/2].
inline TrueSolution heat_solution() {
  TrueSolution f;
  f.kind = SolutionKind::grid_vector;
  f.profile = [](double u) {
    if (u > 0.5) return 0.0;
    const double t = 20.0 * u;
    if (t < 2.0) return 0.75 * t * t / 4.0;
    if (t < 3.0) return 0.75 + (t - 2.0) * (3.0 - t);
    return 0.75 * std::exp(-2.0 * (t - 3.0));
  };
  return f;
}

/// Default benchmark solution for a kernel registry name.
inline TrueSolution default_solution(const std::string& kernel_name, double s = 0.375,
                                     int D = 5000) {
  if (kernel_name == "deriv2") return synthetic_solution(s, D);
  if (kernel_name == "gravity") return gravity_solution();
  if (kernel_name == "heat") return heat_solution();
  throw std::invalid_argument("unknown kernel: " + kernel_name);
}

}  // namespace avgtsvd

#endif
