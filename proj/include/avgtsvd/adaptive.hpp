#ifndef AVGTSVD_ADAPTIVE_HPP
#define AVGTSVD_ADAPTIVE_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "avgtsvd/quadrature_svd.hpp"
#include "avgtsvd/sampling.hpp"
#include "avgtsvd/spectral_deriv2.hpp"

namespace avgtsvd {

enum class ErrSysVariant { gprime, gpp };

/*
 * Discrepancy principle: pick the smallest k whose residual tail falls below
 * tau * sqrt(err_sys^2(m_o) + (m_o/o) delta^2), where the systematic error of
 * the averaged data is estimated either by ||g'||^2/m_o (conservative, works
 * for merely differentiable data) or by ||g''||_inf^2/(9 * 64 * m_o^3)
 * (midpoint grids, twice-differentiable data).
 */
struct DiscrepancyConfig {
  double tau = 1.5;
  ErrSysVariant variant = ErrSysVariant::gprime;
  double g_prime_norm = 0.0;
  double g_pp_inf = 0.0;
  double delta = 0.0;
};

inline double err_sys_squared(const DiscrepancyConfig& cfg, int m_o) {
  if (cfg.variant == ErrSysVariant::gprime) {
    if (!(cfg.g_prime_norm > 0.0))
      throw std::invalid_argument("discrepancy: gprime variant needs ||g'|| > 0");
    return cfg.g_prime_norm * cfg.g_prime_norm / m_o;
  }
  if (!(cfg.g_pp_inf > 0.0)) throw std::invalid_argument("discrepancy: gpp variant needs ||g''|| > 0");
  return cfg.g_pp_inf * cfg.g_pp_inf / (9.0 * 64.0 * std::pow(static_cast<double>(m_o), 3.0));
}

inline double discrepancy_threshold(const DiscrepancyConfig& cfg, int m_o, int o) {
  if (!(cfg.tau > 1.0)) throw std::invalid_argument("discrepancy: tau must exceed 1");
  return cfg.tau * std::sqrt(err_sys_squared(cfg, m_o) +
                             static_cast<double>(m_o) / o * cfg.delta * cfg.delta);
}

/// Core rule on precomputed data coefficients (b, w_j): smallest k >= 0 with
/// sqrt(sum_{j>k} coef_j^2) <= threshold. k = m_o always qualifies.
inline int k_discrepancy_from_coefficients(std::span<const double> coef, double threshold) {
  const int m_o = static_cast<int>(coef.size());
  std::vector<double> tail(m_o + 1, 0.0);
  for (int j = m_o - 1; j >= 0; --j) tail[j] = tail[j + 1] + coef[j] * coef[j];
  for (int k = 0; k <= m_o; ++k)
    if (std::sqrt(tail[k]) <= threshold) return k;
  return m_o;
}

inline int k_discrepancy(const Deriv2Spectral& sys, const NoisySample& sample,
                         const DiscrepancyConfig& cfg) {
  if (sample.grid.m != sys.m() || sample.grid.scheme != GridScheme::uniform_interior)
    throw std::invalid_argument("k_discrepancy: sample does not match the spectral system");
  const auto coef = sys.transform(sample.noisy);
  return k_discrepancy_from_coefficients(coef, discrepancy_threshold(cfg, sys.m(), sample.o));
}

inline int k_discrepancy(const CollocationSystem& sys, const NoisySample& sample,
                         const DiscrepancyConfig& cfg) {
  const int m = sys.m();
  Eigen::Map<const Eigen::VectorXd> b(sample.noisy.data(), m);
  Eigen::VectorXd coef = sys.data_basis.transpose() * b;
  return k_discrepancy_from_coefficients({coef.data(), static_cast<size_t>(m)},
                                         discrepancy_threshold(cfg, m, sample.o));
}

// ---------------------------------------------------------------------------

/// Dyadic-style level ladder m_o = a^{n0}, a^{n0+1}, ..., a^n = m.
struct LadderConfig {
  int a = 4;
  int n = 6;
  int n0 = 2;
};

struct AdaptiveResult {
  int chosen_level = 0;  // m_o
  int chosen_k = 0;
  std::vector<std::pair<int, int>> trajectory;  // (m_o, k_dp), coarse to fine
};

enum class SolvePath { deriv2, quadrature };

/// Stopping logic on a coarse-to-fine k trajectory: stop at the first strict
/// decrease and keep the previous level; ties keep refining. Returns the
/// index of the chosen level (== running argmax, ties toward finer).
inline int choose_level_index(std::span<const int> kdp_coarse_to_fine) {
  int chosen = 0;
  for (size_t i = 1; i < kdp_coarse_to_fine.size(); ++i) {
    if (kdp_coarse_to_fine[i] >= kdp_coarse_to_fine[i - 1])
      chosen = static_cast<int>(i);
    else
      break;
  }
  return chosen;
}

/*
 * Discrepancy principle with dimension reduction: walk the ladder from the
 * coarsest level, recomputing k_dp after each refinement, and stop once the
 * truncation index decreases for the first time (or full resolution is
 * reached). Levels beyond the stop are never evaluated.
 */
inline AdaptiveResult algorithm1(const NoisySample& data, const DiscrepancyConfig& cfg,
                                 const LadderConfig& ladder, SolvePath path,
                                 const Kernel& kernel) {
  const int m = data.grid.m;
  {
    long long check = 1;
    for (int i = 0; i < ladder.n; ++i) check *= ladder.a;
    if (check != m || ladder.n0 >= ladder.n || std::pow(ladder.a, ladder.n0) < 2)
      throw std::invalid_argument("algorithm1: ladder inconsistent with m");
  }
  std::vector<int> levels;  // coarse to fine
  for (int e = ladder.n0; e <= ladder.n; ++e)
    levels.push_back(static_cast<int>(std::llround(std::pow(ladder.a, e))));

  auto kdp_at = [&](int m_o) {
    const NoisySample coarse = average(data, m / m_o);
    if (path == SolvePath::deriv2) {
      Deriv2Spectral sys(m_o);
      return k_discrepancy(sys, coarse, cfg);
    }
    CollocationSystem sys = build_collocation(kernel, m_o);
    return k_discrepancy(sys, coarse, cfg);
  };

  AdaptiveResult result;
  std::vector<int> ks;
  for (int level : levels) {
    const int k = kdp_at(level);
    result.trajectory.emplace_back(level, k);
    ks.push_back(k);
    if (ks.size() >= 2 && ks[ks.size() - 1] < ks[ks.size() - 2]) break;
  }
  const int idx = choose_level_index(ks);
  result.chosen_level = result.trajectory[idx].first;
  result.chosen_k = result.trajectory[idx].second;
  return result;
}

}  // namespace avgtsvd

#endif
