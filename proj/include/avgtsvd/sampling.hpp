#ifndef AVGTSVD_SAMPLING_HPP
#define AVGTSVD_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgtsvd/kernels.hpp"
#include "avgtsvd/quadrature.hpp"
#include "avgtsvd/rng.hpp"

namespace avgtsvd {

enum class GridScheme { uniform_interior, midpoint };

struct GridSpec {
  int m = 0;
  GridScheme scheme = GridScheme::uniform_interior;
  std::vector<double> points;
};

/// uniform_interior: xi_l = l/(m+1); midpoint: xi_j = (2j-1)/(2m).
inline GridSpec make_grid(int m, GridScheme scheme) {
  if (m < 1) throw std::invalid_argument("make_grid: m must be >= 1");
  GridSpec g;
  g.m = m;
  g.scheme = scheme;
  g.points.resize(m);
  for (int i = 1; i <= m; ++i)
    g.points[i - 1] = scheme == GridScheme::uniform_interior
                          ? static_cast<double>(i) / (m + 1)
                          : (2.0 * i - 1.0) / (2.0 * m);
  return g;
}

enum class NoiseLaw { gaussian, heavy_tailed };

/*
 * Noisy point evaluations of the data g = Kf: noisy_l = exact_l + delta Z_l
 * with i.i.d. unit-variance Z. After averaging, `delta` keeps the original
 * noise level while `noise_std` records the effective per-entry deviation
 * delta/sqrt(o); downstream thresholds need both.
 */
struct NoisySample {
  GridSpec grid;
  std::vector<double> exact;
  std::vector<double> noisy;
  double delta = 0.0;      // noise level of the underlying fine measurement
  double noise_std = 0.0;  // effective per-entry std (= delta/sqrt(o))
  int o = 1;               // averaging factor applied so far
  uint64_t seed = 0;
  NoiseLaw law = NoiseLaw::gaussian;
  std::function<double(double)> exact_fn;  // g as a function, when known
};

enum class DataModel {
  automatic,    // series for synthetic deriv2 data, quadrature oracle otherwise
  series,       // closed-form sine series of g
  quadrature,   // adaptive quadrature of (Kf)(xi_l)
};

namespace detail {
inline std::function<double(double)> data_function(const Kernel& kernel, const TrueSolution& f,
                                                   DataModel model) {
  const bool synthetic = f.kind == SolutionKind::synthetic_spectral;
  if (model == DataModel::automatic)
    model = (synthetic && kernel.name == "deriv2") ? DataModel::series : DataModel::quadrature;
  if (model == DataModel::series) {
    if (!synthetic) throw std::invalid_argument("sample_noisy: series data need a synthetic solution");
    // g = Kf has coefficients sigma_j c_j = (pi j)^{-2} c_j on the sine basis.
    std::vector<double> gc(f.coeffs.size());
    for (size_t j = 1; j <= f.coeffs.size(); ++j)
      gc[j - 1] = f.coeffs[j - 1] / std::pow(PI * static_cast<double>(j), 2.0);
    return [gc](double x) {
      double acc = 0.0;
      for (size_t j = 1; j <= gc.size(); ++j) acc += gc[j - 1] * std::sin(j * PI * x);
      return std::sqrt(2.0) * acc;
    };
  }
  auto eval = kernel.eval;
  const bool volterra = kernel.volterra;
  const bool kink = kernel.name == "deriv2";
  return [eval, f, volterra, kink](double x) {
    std::vector<double> breaks;
    if (volterra || kink) breaks.push_back(x);
    return integrate_with_breaks([&](double y) { return eval(x, y) * f(y); }, 0.0, 1.0,
                                 breaks, 1e-12);
  };
}
}  // namespace detail

/// Draw noisy point evaluations of g = Kf on `grid`. Deterministic in `seed`.
inline NoisySample sample_noisy(const Kernel& kernel, const TrueSolution& f, const GridSpec& grid,
                                double delta, uint64_t seed, NoiseLaw law = NoiseLaw::gaussian,
                                DataModel model = DataModel::automatic) {
  if (delta < 0.0) throw std::invalid_argument("sample_noisy: delta must be >= 0");
  NoisySample s;
  s.grid = grid;
  s.delta = delta;
  s.noise_std = delta;
  s.seed = seed;
  s.law = law;
  s.exact_fn = detail::data_function(kernel, f, model);
  s.exact.resize(grid.m);
  for (int i = 0; i < grid.m; ++i) s.exact[i] = s.exact_fn(grid.points[i]);
  s.noisy.resize(grid.m);
  CounterRng rng(seed, 0);
  for (int i = 0; i < grid.m; ++i) {
    const double z = law == NoiseLaw::gaussian ? rng.gaussian() : rng.heavy_tailed();
    s.noisy[i] = s.exact[i] + delta * z;
  }
  return s;
}

/// Compress by block means of o consecutive entries. The coarse grid keeps the
/// scheme at size m/o; exact values are re-evaluated there when g is known as
/// a function (error metrics compare against g on the coarse grid, not against
/// averaged data).
inline NoisySample average(const NoisySample& s, int o) {
  if (o < 1) throw std::invalid_argument("average: o must be >= 1");
  if (s.grid.m % o != 0) throw std::invalid_argument("average: o must divide m");
  const int mo = s.grid.m / o;
  NoisySample out;
  out.grid = make_grid(mo, s.grid.scheme);
  out.delta = s.delta;
  out.noise_std = s.noise_std / std::sqrt(static_cast<double>(o));
  out.o = s.o * o;
  out.seed = s.seed;
  out.law = s.law;
  out.exact_fn = s.exact_fn;
  out.noisy.resize(mo);
  out.exact.resize(mo);
  for (int i = 0; i < mo; ++i) {
    double acc = 0.0;
    for (int t = 0; t < o; ++t) acc += s.noisy[i * o + t];
    out.noisy[i] = acc / o;
    if (out.exact_fn) {
      out.exact[i] = out.exact_fn(out.grid.points[i]);
    } else {
      double e = 0.0;
      for (int t = 0; t < o; ++t) e += s.exact[i * o + t];
      out.exact[i] = e / o;
    }
  }
  return out;
}

/// Admissible averaging factors: divisors o of m with
/// o <= max(sqrt((m+1) delta^2 / rho^2), 1); o is set to the largest one.
struct AveragingPlan {
  int o = 1;
  int m_o = 0;
  std::vector<int> admissible_set;
};

inline AveragingPlan admissible_averaging(int m, double delta, double rho) {
  if (m < 1) throw std::invalid_argument("admissible_averaging: m must be >= 1");
  if (delta < 0.0) throw std::invalid_argument("admissible_averaging: delta must be >= 0");
  if (!(rho > 0.0)) throw std::invalid_argument("admissible_averaging: rho must be positive");
  const double bound = std::max(std::sqrt((m + 1) * delta * delta / (rho * rho)), 1.0);
  AveragingPlan plan;
  for (int o = 1; o <= m; ++o)
    if (m % o == 0 && o <= bound) plan.admissible_set.push_back(o);
  plan.o = plan.admissible_set.back();
  plan.m_o = m / plan.o;
  return plan;
}

/*
 * A-priori averaging factor balancing the averaging bias ||g'||^2/m_o against
 * the averaged noise variance (m_o/o) delta^2: o = (m^2 delta^2 / ||g'||^2)^{1/3}.
 * The snapped level is the ladder element log-closest to m/o.
 */
struct AprioriLevel {
  double o_raw = 0.0;
  int m_o = 0;
};

inline std::vector<int> level_ladder(int m, int base = 4, int coarsest = 16) {
  std::vector<int> ladder;
  for (int level = coarsest; level < m; level *= base) ladder.push_back(level);
  ladder.push_back(m);
  return ladder;
}

inline AprioriLevel apriori_factor(int m, double delta, double g_prime_norm,
                                   std::vector<int> ladder = {}) {
  if (!(g_prime_norm > 0.0)) throw std::invalid_argument("apriori_factor: ||g'|| must be positive");
  if (delta < 0.0) throw std::invalid_argument("apriori_factor: delta must be >= 0");
  if (ladder.empty()) ladder = level_ladder(m);
  AprioriLevel r;
  r.o_raw = std::cbrt(m * static_cast<double>(m) * delta * delta / (g_prime_norm * g_prime_norm));
  const double target = r.o_raw <= 1.0 ? static_cast<double>(m) : m / r.o_raw;
  const double lt = std::log(std::max(target, 1.0));
  double best = 1e300;
  for (int level : ladder) {
    const double d = std::fabs(std::log(static_cast<double>(level)) - lt);
    if (d < best) {
      best = d;
      r.m_o = level;
    }
  }
  return r;
}

/// delta from the signal-to-noise convention SNR = ||g|| / (sqrt(m) delta).
inline double delta_from_snr(double g_norm, int m, double snr) {
  if (m < 1) throw std::invalid_argument("delta_from_snr: m must be >= 1");
  if (!(snr > 0.0)) throw std::invalid_argument("delta_from_snr: snr must be positive");
  return g_norm / (std::sqrt(static_cast<double>(m)) * snr);
}

/// CSV dialect: comma-separated, '.' decimal, header row.
inline void write_csv(const NoisySample& s, std::ostream& os) {
  os << "index,xi,exact,noisy\n";
  os.precision(17);
  for (int i = 0; i < s.grid.m; ++i)
    os << (i + 1) << ',' << s.grid.points[i] << ',' << s.exact[i] << ',' << s.noisy[i] << '\n';
}

/// Replay a stored sample. The grid scheme is recovered from the first
/// abscissa; noise metadata is not stored in the CSV and stays at zero.
inline NoisySample read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index,xi,exact,noisy", 0) != 0)
    throw std::invalid_argument("read_csv: missing sample header");
  std::vector<double> xi, exact, noisy;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double a = 0, b = 0, c = 0, d = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
      throw std::invalid_argument("read_csv: malformed row: " + line);
    xi.push_back(b);
    exact.push_back(c);
    noisy.push_back(d);
  }
  const int m = static_cast<int>(xi.size());
  if (m < 1) throw std::invalid_argument("read_csv: empty sample");
  NoisySample s;
  const double first_uniform = 1.0 / (m + 1);
  const double first_midpoint = 1.0 / (2.0 * m);
  s.grid = make_grid(m, std::fabs(xi[0] - first_uniform) <= std::fabs(xi[0] - first_midpoint)
                            ? GridScheme::uniform_interior
                            : GridScheme::midpoint);
  s.exact = std::move(exact);
  s.noisy = std::move(noisy);
  return s;
}

}  // namespace avgtsvd

#endif
