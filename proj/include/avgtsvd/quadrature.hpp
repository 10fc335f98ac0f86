#ifndef AVGTSVD_QUADRATURE_HPP
#define AVGTSVD_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace avgtsvd {

// Reference quadrature used as the independent oracle throughout the tests
// and for every integral the closed forms do not cover.

namespace detail {
// 8-point Gauss-Legendre nodes/weights on [-1,1].
inline constexpr double gl8_x[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr double gl8_w[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
}  // namespace detail

/// Composite 8-point Gauss-Legendre rule with `panels` equal panels.
template <typename F>
double integrate_panels(F&& f, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("integrate_panels: panels < 1");
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double acc = 0.0;
    for (int q = 0; q < 8; ++q) acc += detail::gl8_w[q] * f(mid + 0.5 * h * detail::gl8_x[q]);
    total += acc * 0.5 * h;
  }
  return total;
}

namespace detail {
template <typename F>
double adaptive_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                     double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (b - a) / 12.0 * (fa + 4.0 * flm + fm);
  const double right = (b - a) / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson to absolute tolerance `tol`.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
  if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: b < a");
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Adaptive integration split at known breakpoints (kernel kinks, Volterra edges).
template <typename F>
double integrate_with_breaks(F&& f, double a, double b, std::vector<double> breaks,
                             double tol = 1e-12) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi > lo) total += integrate_adaptive(f, lo, hi, tol);
  }
  return total;
}

/// L2(0,1) norm by the composite rule; `panels` defaults to 2^15.
template <typename F>
double l2_norm(F&& f, int panels = 1 << 15) {
  const double v = integrate_panels([&](double x) { const double y = f(x); return y * y; },
                                    0.0, 1.0, panels);
  return std::sqrt(std::max(0.0, v));
}

template <typename F, typename G>
double l2_inner(F&& f, G&& g, int panels = 1 << 12) {
  return integrate_panels([&](double x) { return f(x) * g(x); }, 0.0, 1.0, panels);
}

}  // namespace avgtsvd

#endif
