#include <doctest.h>

#include <cmath>

#include "avgtsvd/adaptive.hpp"
#include "avgtsvd/benchmark.hpp"

using namespace avgtsvd;

namespace {

NoisySample deriv2_sample(int m, double s, int D, double delta, uint64_t seed) {
  const Kernel kernel = deriv2_kernel();
  const TrueSolution f = benchmark_solution("deriv2", s, D);
  return sample_noisy(kernel, f, make_grid(m, GridScheme::uniform_interior), delta, seed);
}

}  // namespace

TEST_CASE("discrepancy principle basics") {
  const int m = 64;
  const Deriv2Spectral sys(m);
  NoisySample s = deriv2_sample(m, 0.375, 500, 0.0, 1);

  DiscrepancyConfig cfg;
  cfg.tau = 1.5;
  cfg.g_prime_norm = 1.0;

  // a huge noise level pushes the threshold above ||g|| and stops at once
  cfg.delta = 1e6;
  CHECK(k_discrepancy(sys, s, cfg) == 0);

  // threshold just below ||g|| forces at least one component
  double norm = 0.0;
  for (double v : s.noisy) norm += v * v;
  norm = std::sqrt(norm);
  cfg.delta = 0.0;
  cfg.g_prime_norm = std::sqrt(0.99 * norm * norm * m / (cfg.tau * cfg.tau));
  CHECK(k_discrepancy(sys, s, cfg) >= 1);
}

TEST_CASE("systematic-error variants") {
  DiscrepancyConfig cfg;
  cfg.tau = 1.5;
  cfg.delta = 1e-4;
  cfg.g_prime_norm = 0.5;
  cfg.g_pp_inf = 2.0;

  cfg.variant = ErrSysVariant::gprime;
  CHECK(err_sys_squared(cfg, 64) == doctest::Approx(0.25 / 64.0));
  cfg.variant = ErrSysVariant::gpp;
  CHECK(err_sys_squared(cfg, 64) == doctest::Approx(4.0 / (9.0 * 64.0 * 64.0 * 64.0 * 64.0)));

  // the curvature-based estimate is much tighter on smooth data, so the
  // threshold drops and the stop moves later (or stays)
  const int m = 256;
  const Deriv2Spectral sys(m);
  const TrueSolution f = benchmark_solution("deriv2", 0.375, 2000);
  const double delta = benchmark_delta_deriv2(f, 64.0);
  NoisySample s = deriv2_sample(m, 0.375, 2000, delta, 5);
  cfg.delta = delta;
  cfg.g_prime_norm = deriv2_data_norms(f).g_prime;
  double g_pp = 0.0;
  for (int i = 0; i < 2048; ++i) g_pp = std::max(g_pp, std::fabs(f((i + 0.5) / 2048.0)));
  cfg.g_pp_inf = g_pp;
  cfg.variant = ErrSysVariant::gprime;
  const int k_gprime = k_discrepancy(sys, s, cfg);
  cfg.variant = ErrSysVariant::gpp;
  const int k_gpp = k_discrepancy(sys, s, cfg);
  CHECK(k_gpp >= k_gprime);

  // a missing norm for the selected variant is rejected
  cfg.g_pp_inf = 0.0;
  CHECK_THROWS_AS(k_discrepancy(sys, s, cfg), std::invalid_argument);
}

TEST_CASE("discrepancy index is nonincreasing in tau") {
  const int m = 256;
  const Deriv2Spectral sys(m);
  const TrueSolution f = benchmark_solution("deriv2", 0.375, 2000);
  const double delta = benchmark_delta_deriv2(f, 64.0);
  NoisySample s = deriv2_sample(m, 0.375, 2000, delta, 3);
  DiscrepancyConfig cfg;
  cfg.g_prime_norm = deriv2_data_norms(f).g_prime;
  cfg.delta = delta;
  int prev = m + 1;
  for (double tau : {1.1, 1.5, 2.0, 3.0, 5.0}) {
    cfg.tau = tau;
    const int k = k_discrepancy(sys, s, cfg);
    CHECK(k <= prev);
    prev = k;
  }
}

TEST_CASE("reference discrepancy cell: deriv2, SNR = 64, m_o = 1024") {
  // reference cell: k_dp about 3, relative error about 1.8e-1; under the
  // calibrated noise convention the stop lands between 3 and 4
  const int m = 4096;
  const double s = 0.375;
  const TrueSolution f = benchmark_solution("deriv2", s, 5000);
  const double delta = benchmark_delta_deriv2(f, 64.0);
  const DataNorms norms = deriv2_data_norms(f);
  const Deriv2Spectral sys(1024);
  DiscrepancyConfig cfg;
  cfg.tau = 1.5;
  cfg.g_prime_norm = norms.g_prime;
  cfg.delta = delta;
  double mean_k = 0.0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    NoisySample fine = deriv2_sample(m, s, 5000, delta, 100 + r);
    const NoisySample coarse = average(fine, 4);
    mean_k += static_cast<double>(k_discrepancy(sys, coarse, cfg)) / runs;
  }
  CHECK(mean_k >= 2.5);
  CHECK(mean_k <= 4.5);
}

TEST_CASE("stopping logic on synthetic trajectories") {
  // spec-level behavior of the level chooser
  CHECK(choose_level_index(std::vector<int>{2, 5, 3}) == 1);
  CHECK(choose_level_index(std::vector<int>{2, 2, 2}) == 2);   // ties keep refining
  CHECK(choose_level_index(std::vector<int>{1, 2, 3, 4}) == 3);
  CHECK(choose_level_index(std::vector<int>{4, 3}) == 0);
  CHECK(choose_level_index(std::vector<int>{0}) == 0);
}

TEST_CASE("algorithm 1 end to end on deriv2") {
  const int m = 256;  // 4^4
  const double s = 0.375;
  const TrueSolution f = benchmark_solution("deriv2", s, 2000);
  const double delta = benchmark_delta_deriv2(f, 64.0);
  NoisySample data = deriv2_sample(m, s, 2000, delta, 7);

  DiscrepancyConfig cfg;
  cfg.tau = 1.5;
  cfg.g_prime_norm = deriv2_data_norms(f).g_prime;
  cfg.delta = delta;
  LadderConfig ladder{4, 4, 1};

  const AdaptiveResult res = algorithm1(data, cfg, ladder, SolvePath::deriv2, deriv2_kernel());
  CHECK(res.trajectory.size() <= 4);
  CHECK(res.trajectory.front().first == 4);
  // chosen level is the running argmax of the trajectory, ties toward finer
  int best = 0;
  for (size_t i = 1; i < res.trajectory.size(); ++i)
    if (res.trajectory[i].second >= res.trajectory[best].second) best = static_cast<int>(i);
  CHECK(res.chosen_level == res.trajectory[best].first);
  CHECK(res.chosen_k == res.trajectory[best].second);
  // no level is visited twice and levels increase monotonically
  for (size_t i = 1; i < res.trajectory.size(); ++i)
    CHECK(res.trajectory[i].first == 4 * res.trajectory[i - 1].first);

  CHECK_THROWS_AS(algorithm1(data, cfg, LadderConfig{4, 5, 1}, SolvePath::deriv2, deriv2_kernel()),
                  std::invalid_argument);
}

TEST_CASE("overwhelming noise stops every level at k = 0") {
  // the truncation index collapses to 0 on the whole ladder; the all-tie
  // trajectory then runs to full resolution under the refine-on-tie rule
  const int m = 256;
  NoisySample data = deriv2_sample(m, 0.375, 500, 1e-4, 9);
  DiscrepancyConfig cfg;
  cfg.tau = 1.5;
  cfg.g_prime_norm = 1.0;
  cfg.delta = 1e9;
  const AdaptiveResult res =
      algorithm1(data, cfg, LadderConfig{4, 4, 1}, SolvePath::deriv2, deriv2_kernel());
  for (const auto& [level, k] : res.trajectory) CHECK(k == 0);
  CHECK(res.trajectory.size() == 4);
  CHECK(res.chosen_k == 0);
  CHECK(res.chosen_level == m);
}

TEST_CASE("algorithm 1 runs the quadrature path") {
  const int m = 64;  // 4^3
  const Kernel kernel = gravity_kernel();
  const TrueSolution f = gravity_solution();
  const auto b = collocation_data(kernel, f, m);
  NoisySample data;
  data.grid = make_grid(m, GridScheme::midpoint);
  data.exact = b;
  data.noisy.resize(m);
  const double delta = benchmark_delta_collocation(b, 64.0);
  CounterRng rng(21, 0);
  for (int i = 0; i < m; ++i) data.noisy[i] = b[i] + delta * rng.gaussian();
  data.delta = delta;

  double gp = 0.0;
  for (int i = 0; i + 1 < m; ++i) gp += std::pow((b[i + 1] - b[i]) * m, 2.0);
  DiscrepancyConfig cfg;
  cfg.tau = 1.5;
  cfg.g_prime_norm = std::sqrt(gp / m);
  cfg.delta = delta;

  const AdaptiveResult res =
      algorithm1(data, cfg, LadderConfig{4, 3, 1}, SolvePath::quadrature, kernel);
  CHECK(res.chosen_level >= 4);
  CHECK(res.chosen_level <= 64);
  CHECK(res.chosen_k >= 0);
}
