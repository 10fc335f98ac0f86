#ifndef AVGTSVD_SPECTRAL_DERIV2_HPP
#define AVGTSVD_SPECTRAL_DERIV2_HPP

#include <Eigen/Core>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "avgtsvd/kernels.hpp"
#include "avgtsvd/quadrature.hpp"
#include "avgtsvd/sampling.hpp"

namespace avgtsvd {

/*
 * Closed-form spectral machinery for the deriv2 kernel on the uniform
 * interior grid xi_l = l/(m+1).
 *
 * Continuous operator:   sigma_j = (pi j)^{-2},  v_j = sqrt(2) sin(j pi x).
 * Semi-discrete operator: the eigenvectors of the design matrix T_m are the
 * discrete sine vectors (w_j)_l = sqrt(2/(m+1)) sin(j pi l/(m+1)), and
 *
 *   sigma_jm = sqrt(1 - (2/3) sin^2(j pi/(2(m+1))))
 *              / (4 (m+1)^{3/2} sin^2(j pi/(2(m+1)))).
 *
 * The sine family is a symmetric orthogonal matrix, so one routine serves as
 * both analysis and synthesis transform.
 */
class Deriv2Spectral {
public:
  explicit Deriv2Spectral(int m) : m_(m), grid_(make_grid(m, GridScheme::uniform_interior)) {
    if (m < 1) throw std::invalid_argument("Deriv2Spectral: m must be >= 1");
    const int N = m_ + 1;
    sine_.resize(2 * N);
    for (int q = 0; q < 2 * N; ++q) sine_[q] = std::sin(PI * q / N);
    sigma_.resize(m_);
    for (int j = 1; j <= m_; ++j) {
      const double s = std::sin(j * PI / (2.0 * N));
      sigma_[j - 1] =
          std::sqrt(1.0 - (2.0 / 3.0) * s * s) / (4.0 * std::pow(N, 1.5) * s * s);
    }
  }

  int m() const { return m_; }
  const GridSpec& grid() const { return grid_; }

  static double sigma_cont(int j) { return 1.0 / ((PI * j) * (PI * j)); }

  double sigma_semi(int j) const { return sigma_.at(j - 1); }
  double lambda(int j) const { return sigma_.at(j - 1) * sigma_.at(j - 1); }
  const std::vector<double>& sigma_semi_all() const { return sigma_; }

  /// (w_j)_l, both indices 1-based.
  double eigvec(int j, int l) const {
    const int N = m_ + 1;
    return std::sqrt(2.0 / N) * sine_[static_cast<size_t>(j) * l % (2 * N)];
  }

  /// out[j-1] = (x, w_j) for all j. O(m^2) with a table-driven inner loop.
  void transform(std::span<const double> x, std::span<double> out) const {
    const int N = m_ + 1;
    const double scale = std::sqrt(2.0 / N);
    for (int j = 1; j <= m_; ++j) {
      int idx = 0;
      double acc = 0.0;
      for (int l = 1; l <= m_; ++l) {
        idx += j;
        if (idx >= 2 * N) idx -= 2 * N;
        acc += sine_[idx] * x[l - 1];
      }
      out[j - 1] = scale * acc;
    }
  }

  std::vector<double> transform(std::span<const double> x) const {
    std::vector<double> out(m_);
    transform(x, out);
    return out;
  }

  /// Semi-discrete singular function v_jm(x) = sqrt(2/((m+1) sigma_jm^2))
  /// sum_l sin(j pi xi_l) kappa(xi_l, x). O(m) per evaluation.
  double singular_function(int j, double x) const {
    const int N = m_ + 1;
    double acc = 0.0;
    for (int l = 1; l <= m_; ++l) {
      const double xi = grid_.points[l - 1];
      acc += sine_[static_cast<size_t>(j) * l % (2 * N)] * std::min(xi * (1 - x), x * (1 - xi));
    }
    return std::sqrt(2.0 / (N * lambda(j))) * acc;
  }

private:
  int m_;
  GridSpec grid_;
  std::vector<double> sigma_;
  std::vector<double> sine_;  // sin(pi q/(m+1)), q in [0, 2(m+1))
};

/*
 * Design matrix (T_m)_ij = int_0^1 kappa(xi_i, y) kappa(xi_j, y) dy in closed
 * form. For a = min(xi_i, xi_j), b = max(xi_i, xi_j) the integrand is a
 * piecewise cubic with breaks at a and b:
 *
 *   y <= a:      y^2 (1-a)(1-b)
 *   a <= y <= b: a (1-b) y (1-y)
 *   y >= b:      a b (1-y)^2
 */
inline Eigen::MatrixXd design_matrix_T(int m) {
  if (m < 1) throw std::invalid_argument("design_matrix_T: m must be >= 1");
  const auto grid = make_grid(m, GridScheme::uniform_interior);
  auto bump = [](double t) { return t * t / 2.0 - t * t * t / 3.0; };
  Eigen::MatrixXd T(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double a = grid.points[i];
      const double b = grid.points[j];
      const double v = (1 - a) * (1 - b) * a * a * a / 3.0 + a * (1 - b) * (bump(b) - bump(a)) +
                       a * b * (1 - b) * (1 - b) * (1 - b) / 3.0;
      T(i, j) = v;
      T(j, i) = v;
    }
  return T;
}

/*
 * Exact coefficients (g_m, w_j) of the semi-discrete data for a synthetic
 * solution, j = 1..mm. The sine series of g folds onto the discrete sine
 * basis by aliasing: modes 2a(m+1) +/- j land on mode j with signs +/-, so
 * the coefficient is sqrt(m+1) * sum_a [c_{2aN+j} - c_{2(a+1)N-j}] with
 * c = coefficients of g. Exact for any series length D.
 */
inline std::vector<double> exact_data_coefficients(const TrueSolution& f, int mm) {
  if (f.kind != SolutionKind::synthetic_spectral)
    throw std::invalid_argument("exact_data_coefficients: synthetic solutions only");
  const int N = mm + 1;
  const int D = f.D;
  std::vector<double> out(mm, 0.0);
  for (int j = 1; j <= mm; ++j) {
    double acc = 0.0;
    for (long long a = 0;; ++a) {
      const long long jp = 2 * a * N + j;
      const long long jm = 2 * (a + 1) * N - j;
      bool any = false;
      if (jp <= D) {
        acc += f.coeffs[jp - 1] / std::pow(PI * static_cast<double>(jp), 2.0);
        any = true;
      }
      if (jm <= D) {
        acc -= f.coeffs[jm - 1] / std::pow(PI * static_cast<double>(jm), 2.0);
        any = true;
      }
      if (!any) break;
    }
    out[j - 1] = std::sqrt(static_cast<double>(N)) * acc;
  }
  return out;
}

/// Exact data values g(xi_l) on the uniform interior grid (synthesis of the
/// aliased coefficients).
inline std::vector<double> exact_data_values(const TrueSolution& f, const Deriv2Spectral& sys) {
  const auto coef = exact_data_coefficients(f, sys.m());
  std::vector<double> vals(sys.m());
  sys.transform(coef, vals);
  return vals;
}

/*
 * Spectral cut-off estimate in the anchored-kernel basis:
 * f_k = sum_l alpha_l kappa(xi_l, .) with
 * alpha_l = sum_{j<=k} (noisy, w_j)/lambda_j (w_j)_l.
 *
 * Since the anchored sections of the deriv2 kernel are linear splines, the
 * estimate itself is the linear spline through its grid values; evaluation
 * uses prefix sums and costs O(1) after an O(m) setup.
 */
struct Deriv2Estimate {
  int k = 0;
  int m_o = 0;
  int o = 1;
  std::vector<double> alpha;
  std::vector<double> prefix_lo;  // prefix sums of alpha_l xi_l
  std::vector<double> prefix_hi;  // suffix sums of alpha_l (1 - xi_l)

  double operator()(double x) const {
    const int N = m_o + 1;
    int split = static_cast<int>(std::floor(x * N));  // xi_l <= x iff l <= split
    split = std::max(0, std::min(split, m_o));
    return (1.0 - x) * prefix_lo[split] + x * prefix_hi[split];
  }
};

inline Deriv2Estimate estimate(const Deriv2Spectral& sys, const NoisySample& sample, int k) {
  if (sample.grid.m != sys.m()) throw std::invalid_argument("estimate: grid/system size mismatch");
  if (sample.grid.scheme != GridScheme::uniform_interior)
    throw std::invalid_argument("estimate: uniform interior grid required");
  if (k < 0 || k > sys.m()) throw std::invalid_argument("estimate: k out of range");
  Deriv2Estimate est;
  est.k = k;
  est.m_o = sys.m();
  est.o = sample.o;
  est.alpha.assign(sys.m(), 0.0);
  const auto coef = sys.transform(sample.noisy);
  for (int l = 1; l <= sys.m(); ++l) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += coef[j - 1] / sys.lambda(j) * sys.eigvec(j, l);
    est.alpha[l - 1] = acc;
  }
  est.prefix_lo.assign(sys.m() + 1, 0.0);
  est.prefix_hi.assign(sys.m() + 1, 0.0);
  const auto& xi = sys.grid().points;
  for (int l = 1; l <= sys.m(); ++l)
    est.prefix_lo[l] = est.prefix_lo[l - 1] + est.alpha[l - 1] * xi[l - 1];
  for (int l = sys.m(); l >= 1; --l)
    est.prefix_hi[l - 1] = est.prefix_hi[l] + est.alpha[l - 1] * (1.0 - xi[l - 1]);
  return est;
}

struct ErrorPair {
  double absolute = 0.0;
  double relative = 0.0;
};

/// ||f_k - f||_{L2(0,1)} by the composite reference rule (>= 2^15 panels).
inline ErrorPair l2_error(const Deriv2Estimate& est, const TrueSolution& f, int panels = 1 << 15) {
  const double abs_err =
      l2_norm([&](double x) { return est(x) - f(x); }, panels);
  const double fn = f.l2_norm();
  return ErrorPair{abs_err, fn > 0.0 ? abs_err / fn : abs_err};
}

/*
 * The three terms of the a-priori risk bound at truncation k:
 * variance k^5 delta^2 / m, approximation k^{-4s} rho^2, discretization
 * ||f'||^2 / m^2, plus the balancing index k* = (m rho^2/delta^2)^{1/(5+4s)}.
 */
struct RateTerms {
  double variance = 0.0;
  double approx = 0.0;
  double disc = 0.0;
  double k_star = 0.0;
};

inline RateTerms theorem2_rate(double delta, int m, double s, double rho, int k,
                               double f_prime_norm = 0.0) {
  if (!(delta > 0.0) || m < 1 || !(s > 0.0) || !(rho > 0.0) || k < 1)
    throw std::invalid_argument("theorem2_rate: positive arguments required");
  RateTerms t;
  t.variance = std::pow(static_cast<double>(k), 5.0) * delta * delta / m;
  t.approx = std::pow(static_cast<double>(k), -4.0 * s) * rho * rho;
  t.disc = f_prime_norm * f_prime_norm / (static_cast<double>(m) * m);
  t.k_star = std::pow(m * rho * rho / (delta * delta), 1.0 / (5.0 + 4.0 * s));
  return t;
}

/// The equivalence constants c, C of the averaged/unaveraged risk bracket.
struct RateConstants {
  double lower = 0.0;
  double upper = 0.0;
};

inline RateConstants theorem2_constants(double s) {
  RateConstants c;
  c.lower = 16.0 / (std::pow(PI, 4.0 * s + 4.0) * (3.0 * std::pow(PI, 4.0) + 0.5));
  c.upper = 15.0 * std::pow(PI, 4.0 * s + 8.0) / 16.0;
  return c;
}

}  // namespace avgtsvd

#endif
