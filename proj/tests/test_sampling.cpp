#include <doctest.h>

#include <cmath>
#include <sstream>

#include "avgtsvd/sampling.hpp"

using namespace avgtsvd;

TEST_CASE("grids") {
  const GridSpec u = make_grid(3, GridScheme::uniform_interior);
  CHECK(u.points[0] == doctest::Approx(0.25));
  CHECK(u.points[1] == doctest::Approx(0.5));
  CHECK(u.points[2] == doctest::Approx(0.75));

  const GridSpec m = make_grid(4, GridScheme::midpoint);
  CHECK(m.points[0] == doctest::Approx(0.125));
  CHECK(m.points[1] == doctest::Approx(0.375));
  CHECK(m.points[2] == doctest::Approx(0.625));
  CHECK(m.points[3] == doctest::Approx(0.875));

  CHECK(make_grid(1, GridScheme::midpoint).points[0] == doctest::Approx(0.5));
  for (const auto& g : {u, m})
    for (size_t i = 0; i + 1 < g.points.size(); ++i) CHECK(g.points[i] < g.points[i + 1]);
  CHECK_THROWS_AS(make_grid(0, GridScheme::midpoint), std::invalid_argument);
}

TEST_CASE("sample_noisy basics") {
  const Kernel kernel = deriv2_kernel();
  const TrueSolution f = synthetic_solution(0.5, 50);
  const GridSpec grid = make_grid(8, GridScheme::uniform_interior);

  const NoisySample clean = sample_noisy(kernel, f, grid, 0.0, 7);
  for (int i = 0; i < 8; ++i) CHECK(clean.noisy[i] == clean.exact[i]);

  const NoisySample a = sample_noisy(kernel, f, grid, 0.1, 7);
  const NoisySample b = sample_noisy(kernel, f, grid, 0.1, 7);
  for (int i = 0; i < 8; ++i) CHECK(a.noisy[i] == b.noisy[i]);

  CHECK_THROWS_AS(sample_noisy(kernel, f, grid, -0.1, 7), std::invalid_argument);
}

TEST_CASE("exact deriv2 data follows the closed-form series") {
  // g = Kf has sine coefficients (pi j)^{-2(1+s)}; at s=1/2, D=1, x=1/2 the
  // value is pi^{-3} sqrt(2)
  const Kernel kernel = deriv2_kernel();
  const TrueSolution f = synthetic_solution(0.5, 1);
  const GridSpec grid = make_grid(3, GridScheme::uniform_interior);
  const NoisySample s = sample_noisy(kernel, f, grid, 0.0, 1);
  CHECK(s.exact[1] == doctest::Approx(std::pow(PI, -3.0) * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.exact[1] == doctest::Approx(0.045616).epsilon(1e-4));

  // series and quadrature-oracle data models agree
  const NoisySample q =
      sample_noisy(kernel, f, grid, 0.0, 1, NoiseLaw::gaussian, DataModel::quadrature);
  for (int i = 0; i < 3; ++i) CHECK(q.exact[i] == doctest::Approx(s.exact[i]).epsilon(1e-9));
}

TEST_CASE("noise statistics at m = 1e5") {
  const Kernel kernel = deriv2_kernel();
  const TrueSolution f = synthetic_solution(0.5, 2);
  const GridSpec grid = make_grid(100000, GridScheme::uniform_interior);
  const double delta = 0.37;
  for (NoiseLaw law : {NoiseLaw::gaussian, NoiseLaw::heavy_tailed}) {
    const NoisySample s = sample_noisy(kernel, f, grid, delta, 123, law);
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < grid.m; ++i) mean += (s.noisy[i] - s.exact[i]) / grid.m;
    for (int i = 0; i < grid.m; ++i) {
      const double d = s.noisy[i] - s.exact[i] - mean;
      var += d * d / (grid.m - 1);
    }
    CHECK(std::fabs(mean) < 0.05 * delta);
    CHECK(var == doctest::Approx(delta * delta).epsilon(law == NoiseLaw::gaussian ? 0.05 : 0.15));
  }
}

TEST_CASE("averaging block means") {
  NoisySample s;
  s.grid = make_grid(4, GridScheme::midpoint);
  s.noisy = {1.0, 3.0, 5.0, 7.0};
  s.exact = {1.0, 3.0, 5.0, 7.0};
  s.delta = 0.5;
  s.noise_std = 0.5;

  const NoisySample two = average(s, 2);
  CHECK(two.noisy[0] == doctest::Approx(2.0));
  CHECK(two.noisy[1] == doctest::Approx(6.0));
  CHECK(two.noise_std == doctest::Approx(0.5 / std::sqrt(2.0)));
  CHECK(two.delta == 0.5);
  CHECK(two.o == 2);

  const NoisySample one = average(s, 1);
  for (int i = 0; i < 4; ++i) CHECK(one.noisy[i] == s.noisy[i]);
  CHECK(one.grid.points == s.grid.points);

  CHECK_THROWS_AS(average(s, 3), std::invalid_argument);
}

TEST_CASE("midpoint block means land exactly on the coarse abscissae") {
  const GridSpec fine = make_grid(4, GridScheme::midpoint);
  CHECK(0.5 * (fine.points[0] + fine.points[1]) == doctest::Approx(0.25));
  const GridSpec fine2 = make_grid(24, GridScheme::midpoint);
  const GridSpec coarse = make_grid(6, GridScheme::midpoint);
  for (int i = 0; i < 6; ++i) {
    double mean = 0.0;
    for (int t = 0; t < 4; ++t) mean += fine2.points[i * 4 + t] / 4.0;
    CHECK(mean == doctest::Approx(coarse.points[i]).epsilon(1e-15));
  }
}

TEST_CASE("averaging composes over factorizations") {
  NoisySample s;
  s.grid = make_grid(24, GridScheme::midpoint);
  s.noisy.resize(24);
  s.exact.assign(24, 0.0);
  CounterRng rng(5, 0);
  for (auto& v : s.noisy) v = rng.gaussian();
  const NoisySample ab = average(average(s, 2), 3);
  const NoisySample ba = average(average(s, 3), 2);
  const NoisySample direct = average(s, 6);
  for (int i = 0; i < 4; ++i) {
    CHECK(ab.noisy[i] == doctest::Approx(direct.noisy[i]).epsilon(1e-15));
    CHECK(ba.noisy[i] == doctest::Approx(direct.noisy[i]).epsilon(1e-15));
  }
  CHECK(ab.o == 6);
}

TEST_CASE("block means of pure noise have variance delta^2/o") {
  const int m = 100000, o = 8;
  const double delta = 1.0;
  double var = 0.0;
  int count = 0;
  for (int rep = 0; rep < 100; ++rep) {
    CounterRng rng(99, rep);
    for (int i = 0; i < m / o / 100; ++i) {  // subsample blocks per rep
      double mean = 0.0;
      for (int t = 0; t < o; ++t) mean += delta * rng.gaussian() / o;
      var += mean * mean;
      ++count;
    }
  }
  var /= count;
  CHECK(var == doctest::Approx(delta * delta / o).epsilon(0.05));
}

TEST_CASE("averaging bias bounds for smooth data") {
  // midpoint grids: ||avg g - g||^2 <= ||g''||_inf^2 / (9 * 64 m_o^3)
  const int m = 4096;
  const GridSpec fine = make_grid(m, GridScheme::midpoint);
  auto g = [](double x) { return std::sin(2.0 * PI * x); };
  const double gpp = 4.0 * PI * PI;
  for (int o : {2, 4, 8}) {
    const int mo = m / o;
    const GridSpec coarse = make_grid(mo, GridScheme::midpoint);
    double lhs = 0.0;
    for (int i = 0; i < mo; ++i) {
      double mean = 0.0;
      for (int t = 0; t < o; ++t) mean += g(fine.points[i * o + t]) / o;
      const double d = mean - g(coarse.points[i]);
      lhs += d * d;
    }
    CHECK(lhs <= gpp * gpp / (9.0 * 64.0 * std::pow(static_cast<double>(mo), 3.0)));
  }

  // uniform grids: ||avg g - g||^2 <= (o/(m+1)) ||g'||^2
  const GridSpec fu = make_grid(m, GridScheme::uniform_interior);
  const double gp2 = 2.0 * PI * PI;  // ||g'||^2 for sin(2 pi x)
  for (int o : {2, 4, 8}) {
    const int mo = m / o;
    const GridSpec cu = make_grid(mo, GridScheme::uniform_interior);
    double lhs = 0.0;
    for (int i = 0; i < mo; ++i) {
      double mean = 0.0;
      for (int t = 0; t < o; ++t) mean += g(fu.points[i * o + t]) / o;
      const double d = mean - g(cu.points[i]);
      lhs += d * d;
    }
    CHECK(lhs <= o / (m + 1.0) * gp2);
  }
}

TEST_CASE("admissible averaging") {
  // bound 4 on m = 100: divisors {1, 2, 4}
  const double delta = std::sqrt(16.0 / 101.0);
  const AveragingPlan p = admissible_averaging(100, delta, 1.0);
  CHECK(p.admissible_set == std::vector<int>{1, 2, 4});
  CHECK(p.o == 4);
  CHECK(p.m_o == 25);

  const AveragingPlan zero = admissible_averaging(100, 0.0, 1.0);
  CHECK(zero.admissible_set == std::vector<int>{1});
  CHECK(zero.o == 1);

  const AveragingPlan tight = admissible_averaging(64, 1.0, std::sqrt(65.0));
  CHECK(tight.admissible_set == std::vector<int>{1});

  CHECK_THROWS_AS(admissible_averaging(100, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("a-priori averaging factor") {
  const AprioriLevel a = apriori_factor(64, 0.1, 1.0);
  CHECK(a.o_raw == doctest::Approx(std::cbrt(40.96)).epsilon(1e-12));
  CHECK(a.o_raw == doctest::Approx(3.448).epsilon(1e-3));

  const AprioriLevel b = apriori_factor(4096, 1e-12, 1.0);
  CHECK(b.o_raw < 1e-5);
  CHECK(b.m_o == 4096);

  const double d = 1.0 / 4096.0;  // m^2 delta^2 = ||g'||^2
  CHECK(apriori_factor(4096, d, 1.0).o_raw == doctest::Approx(1.0));

  CHECK_THROWS_AS(apriori_factor(64, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("delta from snr") {
  CHECK(delta_from_snr(1.0, 4096, 512.0) == doctest::Approx(1.0 / (64.0 * 512.0)));
  CHECK(delta_from_snr(1.0, 4096, 512.0) == doctest::Approx(3.0518e-5).epsilon(1e-4));
  CHECK(delta_from_snr(2.0, 1, 1.0) == doctest::Approx(2.0));
  CHECK(delta_from_snr(1.0, 100, 8.0) == doctest::Approx(2.0 * delta_from_snr(1.0, 100, 16.0)));
  CHECK_THROWS_AS(delta_from_snr(1.0, 100, 0.0), std::invalid_argument);
}

TEST_CASE("noisy sample CSV round trip") {
  const Kernel kernel = deriv2_kernel();
  const TrueSolution f = synthetic_solution(0.5, 3);
  for (GridScheme scheme : {GridScheme::uniform_interior, GridScheme::midpoint}) {
    const NoisySample s = sample_noisy(kernel, f, make_grid(3, scheme), 0.01, 9);
    std::ostringstream os;
    write_csv(s, os);
    const std::string text = os.str();
    CHECK(text.rfind("index,xi,exact,noisy\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);

    std::istringstream is(text);
    const NoisySample back = read_csv(is);
    CHECK(back.grid.scheme == scheme);
    for (int i = 0; i < 3; ++i) {
      CHECK(back.noisy[i] == s.noisy[i]);
      CHECK(back.exact[i] == s.exact[i]);
      CHECK(back.grid.points[i] == doctest::Approx(s.grid.points[i]));
    }
  }
  std::istringstream bad("nope\n");
  CHECK_THROWS_AS(read_csv(bad), std::invalid_argument);
}
