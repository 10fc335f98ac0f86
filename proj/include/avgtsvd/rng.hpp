#ifndef AVGTSVD_RNG_HPP
#define AVGTSVD_RNG_HPP

#include <cmath>
#include <cstdint>

namespace avgtsvd {

/*
 * Counter-based PRNG built on the splitmix64 finalizer (Steele/Lea/Flood,
 * "Fast splittable pseudorandom number generators").
 *
 * Output n is a pure function of (seed, stream, n): a run index selects a
 * stream, the counter walks it. Sequences are identical on every platform
 * and compiler, which std::normal_distribution does not guarantee, so all
 * Gaussian draws go through an explicit Box-Muller transform.
 */
class CounterRng {
public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0) {
    key_ = finalize(seed + GOLDEN);
    key_ = finalize(key_ ^ (stream + 0xD1B54A32D192ED03ull));
  }

  uint64_t next_u64() { return finalize(key_ + (++counter_) * GOLDEN); }

  /// Uniform on (0,1]; never 0, so log() of it is finite.
  double next_unit() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal (Box-Muller, pairwise).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Student-t with 3 degrees of freedom, rescaled to unit variance.
  double heavy_tailed() {
    const double z = gaussian();
    const double a = gaussian(), b = gaussian(), c = gaussian();
    const double chi3 = a * a + b * b + c * c;
    // Var(t_3) = 3, hence the extra 1/sqrt(3).
    return z / std::sqrt(chi3 / 3.0) / std::sqrt(3.0);
  }

private:
  static constexpr uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;
  static constexpr double pi = 3.14159265358979323846;

  static uint64_t finalize(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t key_ = 0;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace avgtsvd

#endif
