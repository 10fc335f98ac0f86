#ifndef AVGTSVD_QUADRATURE_SVD_HPP
#define AVGTSVD_QUADRATURE_SVD_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "avgtsvd/kernels.hpp"
#include "avgtsvd/linalg.hpp"
#include "avgtsvd/quadrature.hpp"
#include "avgtsvd/rng.hpp"
#include "avgtsvd/sampling.hpp"

namespace avgtsvd {

/*
 * Midpoint-collocation path for general kernels: A_ij = kappa(xi_i, xi_j)/m on
 * the midpoint grid, with its full singular value decomposition.
 *
 * Orientation: data_basis holds the vectors paired with measurements (inner
 * products (b, w_j) read data), solution_basis holds the vectors the estimate
 * is built from, and A * solution_basis_j = sigma_j * data_basis_j. The
 * reconstructed singular functions are
 *
 *   v_j(x) = (sigma_j sqrt(m))^{-1} sum_l (w_j)_l kappa(xi_l, x),
 *
 * whose grid values are sqrt(m) * solution_basis_j.
 */
struct CollocationSystem {
  Kernel kernel;
  GridSpec grid;
  Eigen::MatrixXd A;
  Eigen::VectorXd sigma;          // nonincreasing
  Eigen::MatrixXd data_basis;     // w-columns
  Eigen::MatrixXd solution_basis; // z-columns
  double rank_tol = 0.0;
  int rank = 0;

  int m() const { return grid.m; }
};

inline CollocationSystem build_collocation(const Kernel& kernel, int m) {
  if (m < 1) throw std::invalid_argument("build_collocation: m must be >= 1");
  CollocationSystem sys;
  sys.kernel = kernel;
  sys.grid = make_grid(m, GridScheme::midpoint);
  sys.A.resize(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      sys.A(i, j) = kernel.eval(sys.grid.points[i], sys.grid.points[j]) / m;
  SvdResult svd = dense_svd(sys.A, kernel.symmetric);
  sys.sigma = std::move(svd.sigma);
  sys.data_basis = std::move(svd.U);
  sys.solution_basis = std::move(svd.V);
  sys.rank_tol = m * std::numeric_limits<double>::epsilon() * sys.sigma[0];
  sys.rank = 0;
  while (sys.rank < m && sys.sigma[sys.rank] > sys.rank_tol) ++sys.rank;
  return sys;
}

/// Normalized design matrix (S_m)_ij = (1/m) int kappa(x, xi_i) kappa(x, xi_j) dx,
/// entries by the adaptive quadrature oracle. Grid defaults to midpoints.
inline Eigen::MatrixXd design_matrix_S(const Kernel& kernel, const GridSpec& grid,
                                       double tol = 1e-11) {
  const int m = grid.m;
  Eigen::MatrixXd S(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      std::vector<double> breaks;
      if (kernel.volterra || kernel.name == "deriv2") {
        breaks.push_back(grid.points[i]);
        breaks.push_back(grid.points[j]);
      }
      const double v = integrate_with_breaks(
          [&](double x) { return kernel.eval(x, grid.points[i]) * kernel.eval(x, grid.points[j]); },
          0.0, 1.0, breaks, tol) / m;
      S(i, j) = v;
      S(j, i) = v;
    }
  return S;
}

inline Eigen::MatrixXd design_matrix_S(const Kernel& kernel, int m, double tol = 1e-11) {
  return design_matrix_S(kernel, make_grid(m, GridScheme::midpoint), tol);
}

/// Reconstructed singular function x -> v_j(x); j is 1-based and must lie
/// within the numerical rank.
inline std::function<double(double)> singular_function(const CollocationSystem& sys, int j) {
  if (j < 1 || j > sys.rank)
    throw std::invalid_argument("singular_function: index beyond numerical rank");
  const double scale = 1.0 / (sys.sigma[j - 1] * std::sqrt(static_cast<double>(sys.m())));
  const Eigen::VectorXd w = sys.data_basis.col(j - 1);
  const GridSpec grid = sys.grid;
  auto eval = sys.kernel.eval;
  return [scale, w, grid, eval](double x) {
    double acc = 0.0;
    for (int l = 0; l < grid.m; ++l) acc += w[l] * eval(grid.points[l], x);
    return scale * acc;
  };
}

/*
 * Truncated-SVD estimate from (possibly averaged) data: grid values
 * sum_{j<=k} ((b, w_j)/sigma_j) z_j and anchored-kernel coefficients
 * alpha_l = sum_{j<=k} (b, w_j)/(m sigma_j^2) (w_j)_l.
 */
struct GridEstimate {
  int k = 0;
  int m_o = 0;
  int o = 1;
  std::vector<double> values;
  std::vector<double> coeffs;
};

inline GridEstimate grid_estimate(const CollocationSystem& sys, const NoisySample& sample, int k) {
  if (sample.grid.m != sys.m())
    throw std::invalid_argument("grid_estimate: sample/system size mismatch");
  if (k < 0 || k > sys.rank)
    throw std::invalid_argument("grid_estimate: k beyond numerical rank");
  const int m = sys.m();
  Eigen::Map<const Eigen::VectorXd> b(sample.noisy.data(), m);
  GridEstimate est;
  est.k = k;
  est.m_o = m;
  est.o = sample.o;
  est.values.assign(m, 0.0);
  est.coeffs.assign(m, 0.0);
  Eigen::Map<Eigen::VectorXd> values(est.values.data(), m);
  Eigen::Map<Eigen::VectorXd> coeffs(est.coeffs.data(), m);
  for (int j = 0; j < k; ++j) {
    const double c = sys.data_basis.col(j).dot(b) / sys.sigma[j];
    values += c * sys.solution_basis.col(j);
    coeffs += c / (m * sys.sigma[j]) * sys.data_basis.col(j);
  }
  return est;
}

/// Residual estimate sqrt(sum_{j>k} (b, w_j)^2), the tail of the data in the
/// data-side basis; computed as a suffix sum so it is exactly monotone in k.
inline double residual_tail(const CollocationSystem& sys, const NoisySample& sample, int k) {
  if (sample.grid.m != sys.m())
    throw std::invalid_argument("residual_tail: sample/system size mismatch");
  if (k < 0) throw std::invalid_argument("residual_tail: k must be >= 0");
  const int m = sys.m();
  Eigen::Map<const Eigen::VectorXd> b(sample.noisy.data(), m);
  double acc = 0.0;
  for (int j = m - 1; j >= k; --j) {
    const double c = sys.data_basis.col(j).dot(b);
    acc += c * c;
  }
  return std::sqrt(acc);
}

/*
 * Bookkeeping for the perturbation bounds: spectral gaps c_j, multiplicities
 * M_i (values within 1e-8 relative are treated as one cluster), and the
 * largest index J up to which the reconstructed singular functions are
 * provably close to the continuous ones:
 *
 *   J = max{ j : max(2 C_K^2/(3 c_i m^2), 10 M_i C_K^3/(c_i sigma_i m^2)) < 1
 *            for all i <= j }.
 */
struct BoundContext {
  std::vector<double> sigma_ref;   // continuous singular values (or surrogate)
  std::vector<double> f_coeffs;    // (f, v_j) against the reference basis
  std::vector<double> c_gap;       // c_j
  std::vector<int> psi_minus;      // first index of the cluster of j (1-based)
  std::vector<int> psi_plus;       // last index of the cluster of j (1-based)
  std::vector<int> multiplicity;   // M_i = 1 + max_{j<=i} (psi_plus - psi_minus)
  int J = 0;
  int m = 0;
  double C_K = 0.0;
  bool surrogate_reference = false;
};

inline BoundContext bound_context(const CollocationSystem& sys,
                                  std::span<const double> reference_sigma,
                                  std::span<const double> f_coeffs = {},
                                  bool surrogate_reference = false) {
  const int n = static_cast<int>(reference_sigma.size());
  if (n < 1) throw std::invalid_argument("bound_context: empty reference spectrum");
  BoundContext ctx;
  ctx.sigma_ref.assign(reference_sigma.begin(), reference_sigma.end());
  ctx.f_coeffs.assign(f_coeffs.begin(), f_coeffs.end());
  ctx.m = sys.m();
  ctx.C_K = sys.kernel.smoothness_bound;
  ctx.surrogate_reference = surrogate_reference;
  ctx.psi_minus.resize(n);
  ctx.psi_plus.resize(n);
  constexpr double group_tol = 1e-8;
  for (int j = 0; j < n;) {
    int hi = j;
    while (hi + 1 < n &&
           std::fabs(ctx.sigma_ref[hi + 1] - ctx.sigma_ref[j]) <= group_tol * ctx.sigma_ref[j])
      ++hi;
    for (int t = j; t <= hi; ++t) {
      ctx.psi_minus[t] = j + 1;
      ctx.psi_plus[t] = hi + 1;
    }
    j = hi + 1;
  }
  ctx.multiplicity.resize(n);
  int running = 1;
  for (int i = 0; i < n; ++i) {
    running = std::max(running, ctx.psi_plus[i] - ctx.psi_minus[i] + 1);
    ctx.multiplicity[i] = running;
  }
  ctx.c_gap.resize(n);
  for (int j = 0; j < n; ++j) {
    const double s2 = ctx.sigma_ref[j] * ctx.sigma_ref[j];
    const int hi = ctx.psi_plus[j], lo = ctx.psi_minus[j];
    double up = std::numeric_limits<double>::infinity();    // sigma_{lo-1}^2 - sigma_j^2
    double down = std::numeric_limits<double>::infinity();  // sigma_j^2 - sigma_{hi+1}^2
    if (lo >= 2) up = ctx.sigma_ref[lo - 2] * ctx.sigma_ref[lo - 2] - s2;
    if (hi < n) down = s2 - ctx.sigma_ref[hi] * ctx.sigma_ref[hi];
    ctx.c_gap[j] = std::min(up, down);
  }
  const double m2 = static_cast<double>(ctx.m) * ctx.m;
  const double ck2 = ctx.C_K * ctx.C_K;
  const double ck3 = ck2 * ctx.C_K;
  ctx.J = 0;
  for (int j = 1; j <= n; ++j) {
    const int i = j - 1;
    // The gap below the last reference cluster is unknown; stop there.
    if (ctx.psi_plus[i] >= n) break;
    if (!(ctx.c_gap[i] > 0.0) || !std::isfinite(ctx.c_gap[i])) break;
    const double cond = std::max(2.0 * ck2 / (3.0 * ctx.c_gap[i] * m2),
                                 10.0 * ctx.multiplicity[i] * ck3 /
                                     (ctx.c_gap[i] * ctx.sigma_ref[i] * m2));
    if (cond >= 1.0) break;
    ctx.J = j;
  }
  return ctx;
}

/*
 * Right-hand side of the averaged risk bound, term by term; with o = 1 the
 * two averaging-bias terms drop and the expression is the unaveraged bound.
 * Valid for k <= J only.
 */
struct BoundBreakdown {
  double variance = 0.0;
  double avg_bias_low = 0.0;    // ||g''||/(12 m_o^2 sigma_k)
  double avg_bias_high = 0.0;   // C_K ||g''||/(12 sqrt(6) m_o^3) sqrt(sum sigma_j^-4)
  double approx_tail = 0.0;     // sqrt(sum_{j > psi_+(k)} (f, v_j)^2)
  double cluster = 0.0;         // 2 M_k sqrt(sum_{psi_-(k)..psi_+(k)} (f, v_j)^2)
  double disc_gram = 0.0;       // (1 + sqrt(2 M_k)) C_K^3 ||f|| / m_o^2 * sqrt(sum 1/(c_j^2 sigma_j^2))
  double disc_cross = 0.0;      // sqrt(2) C_K^4 ||f|| / (sqrt(3) m_o^3) * sum 1/(c_j sigma_j^2)
  double disc_projection = 0.0; // M_k max_{i <= psi_+(k)} 20 M_i C_K^3 ||f|| / (c_i sigma_i m_o^2)
  double total = 0.0;
};

inline BoundBreakdown theorem_bounds(const BoundContext& ctx, int k, double delta, int m, int o,
                                     double f_norm, double g_pp_inf) {
  if (k < 0 || k > ctx.J) throw std::invalid_argument("theorem_bounds: k must satisfy 0 <= k <= J");
  if (o < 1 || m % o != 0) throw std::invalid_argument("theorem_bounds: o must divide m");
  const double m_o = static_cast<double>(m) / o;
  BoundBreakdown b;
  double inv2 = 0.0, inv4 = 0.0, gram = 0.0, cross = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double s = ctx.sigma_ref[j - 1];
    const double c = ctx.c_gap[j - 1];
    inv2 += 1.0 / (s * s);
    inv4 += 1.0 / (s * s * s * s);
    gram += 1.0 / (c * c * s * s);
    cross += 1.0 / (c * s * s);
  }
  b.variance = 2.0 * delta / std::sqrt(static_cast<double>(m)) * std::sqrt(inv2);
  if (o > 1 && k >= 1) {
    b.avg_bias_low = g_pp_inf / (12.0 * m_o * m_o * ctx.sigma_ref[k - 1]);
    b.avg_bias_high = ctx.C_K * g_pp_inf / (12.0 * std::sqrt(6.0) * m_o * m_o * m_o) * std::sqrt(inv4);
  }
  const int psi_plus_k = k >= 1 ? ctx.psi_plus[k - 1] : 0;
  const int psi_minus_k = k >= 1 ? ctx.psi_minus[k - 1] : 1;
  const int Mk = k >= 1 ? ctx.multiplicity[k - 1] : 1;
  double tail = f_norm * f_norm;
  for (int j = 1; j <= psi_plus_k && j <= static_cast<int>(ctx.f_coeffs.size()); ++j)
    tail -= ctx.f_coeffs[j - 1] * ctx.f_coeffs[j - 1];
  b.approx_tail = std::sqrt(std::max(0.0, tail));
  if (k >= 1) {
    double cl = 0.0;
    for (int j = psi_minus_k; j <= psi_plus_k && j <= static_cast<int>(ctx.f_coeffs.size()); ++j)
      cl += ctx.f_coeffs[j - 1] * ctx.f_coeffs[j - 1];
    b.cluster = 2.0 * Mk * std::sqrt(cl);
  }
  const double ck3 = ctx.C_K * ctx.C_K * ctx.C_K;
  b.disc_gram = (1.0 + std::sqrt(2.0 * Mk)) * ck3 * f_norm / (m_o * m_o) * std::sqrt(gram);
  b.disc_cross = std::sqrt(2.0) * ck3 * ctx.C_K * f_norm / (std::sqrt(3.0) * m_o * m_o * m_o) * cross;
  double worst = 0.0;
  for (int i = 1; i <= psi_plus_k; ++i)
    worst = std::max(worst, 20.0 * ctx.multiplicity[i - 1] * ck3 * f_norm /
                                (ctx.c_gap[i - 1] * ctx.sigma_ref[i - 1] * m_o * m_o));
  b.disc_projection = Mk * worst;
  b.total = b.variance + b.avg_bias_low + b.avg_bias_high + b.approx_tail + b.cluster +
            b.disc_gram + b.disc_cross + b.disc_projection;
  return b;
}

/*
 * Two-step randomized truncated SVD (optional demonstrator, never used for
 * the benchmark tables): Gaussian range sketch of size n with a couple of
 * QR-stabilized power iterations, then a small dense SVD of the projected
 * matrix, keeping the leading k triples.
 */
struct TruncatedSvd {
  Eigen::VectorXd sigma;     // k leading values
  Eigen::MatrixXd data_basis;
  Eigen::MatrixXd solution_basis;
  double range_error = 0.0;  // ||A - Q Q^T A||_2 estimate
};

inline TruncatedSvd two_step_truncated_svd(const Eigen::MatrixXd& A, int n, int k, uint64_t seed,
                                           int power_iterations = 2) {
  const int m = static_cast<int>(A.rows());
  if (k < 0 || k > n || n > m) throw std::invalid_argument("two_step_truncated_svd: need k <= n <= m");
  CounterRng rng(seed, 0);
  Eigen::MatrixXd omega(A.cols(), n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < A.cols(); ++i) omega(i, j) = rng.gaussian();
  auto thin_q = [m, n](const Eigen::MatrixXd& Y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(m, n));
  };
  Eigen::MatrixXd Q = thin_q(A * omega);
  for (int it = 0; it < power_iterations; ++it) {
    Q = thin_q(A.transpose() * Q);
    Q = thin_q(A * Q);
  }
  Eigen::MatrixXd B = Q.transpose() * A;  // n x m
  Eigen::BDCSVD<Eigen::MatrixXd> small(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd r;
  r.sigma = small.singularValues().head(k);
  r.data_basis = Q * small.matrixU().leftCols(k);
  r.solution_basis = small.matrixV().leftCols(k);
  // spectral norm of the range residual by a few power iterations
  Eigen::MatrixXd R = A - Q * B;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
  double est = 0.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd w = R.transpose() * (R * v);
    est = std::sqrt(w.norm());
    if (w.norm() == 0.0) break;
    v = w.normalized();
  }
  r.range_error = est;
  return r;
}

}  // namespace avgtsvd

#endif
