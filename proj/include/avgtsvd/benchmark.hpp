#ifndef AVGTSVD_BENCHMARK_HPP
#define AVGTSVD_BENCHMARK_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "avgtsvd/kernels.hpp"
#include "avgtsvd/quadrature_svd.hpp"
#include "avgtsvd/sampling.hpp"

namespace avgtsvd {

/*
 * Benchmark conventions shared by the experiment harness and the CLI.
 *
 * The deriv2 benchmark measures smoothness on the squared-operator scale: a
 * label s corresponds to spectral coefficients (pi j)^{-4s}, i.e. to
 * synthetic_solution(2s, D). Its noise level is tied to the slope of the
 * exact data, delta = ||g'|| / (4 snr). The collocation benchmarks (gravity,
 * heat) build data as b = A_m x_m and use delta = ||b|| / (sqrt(m) snr).
 */
inline TrueSolution benchmark_solution(const std::string& problem, double s = 0.375,
                                       int D = 5000) {
  if (problem == "deriv2") return synthetic_solution(2.0 * s, D);
  return default_solution(problem);
}

struct DataNorms {
  double g = 0.0;        // ||g||_{L2}
  double g_prime = 0.0;  // ||g'||_{L2}
};

/// Exact data norms of g = Kf for a synthetic deriv2 solution.
inline DataNorms deriv2_data_norms(const TrueSolution& f) {
  DataNorms n;
  double g2 = 0.0, gp2 = 0.0;
  for (int j = 1; j <= f.D; ++j) {
    const double gj = f.coeffs[j - 1] / std::pow(PI * j, 2.0);
    g2 += gj * gj;
    gp2 += gj * gj * std::pow(PI * j, 2.0);
  }
  n.g = std::sqrt(g2);
  n.g_prime = std::sqrt(gp2);
  return n;
}

inline double benchmark_delta_deriv2(const TrueSolution& f, double snr) {
  return deriv2_data_norms(f).g_prime / (4.0 * snr);
}

inline double benchmark_delta_collocation(std::span<const double> b, double snr) {
  double b2 = 0.0;
  for (double v : b) b2 += v * v;
  return std::sqrt(b2) / (std::sqrt(static_cast<double>(b.size())) * snr);
}

/// Collocation data vector b = A_m x_m without keeping the matrix around.
inline std::vector<double> collocation_data(const Kernel& kernel, const TrueSolution& f, int m) {
  const auto grid = make_grid(m, GridScheme::midpoint);
  const auto x = f.sample(grid.points);
  std::vector<double> b(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += kernel.eval(grid.points[i], grid.points[j]) * x[j];
    b[i] = acc / m;
  }
  return b;
}

}  // namespace avgtsvd

#endif
