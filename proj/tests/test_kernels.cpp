#include <doctest.h>

#include <cmath>

#include "avgtsvd/kernels.hpp"
#include "avgtsvd/quadrature.hpp"

using namespace avgtsvd;

TEST_CASE("deriv2 kernel values") {
  const Kernel k = deriv2_kernel();
  CHECK(k.eval(0.5, 0.5) == doctest::Approx(0.25));
  CHECK(k.eval(0.25, 0.75) == doctest::Approx(0.0625));
  for (double x : {0.0, 0.3, 0.8, 1.0}) {
    CHECK(k.eval(x, 0.0) == 0.0);
    CHECK(k.eval(x, 1.0) == doctest::Approx(0.0));
  }
}

TEST_CASE("deriv2 kernel is exactly symmetric") {
  const Kernel k = deriv2_kernel();
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double x = i / 20.0, y = j / 20.0;
      CHECK(k.eval(x, y) == k.eval(y, x));
    }
}

TEST_CASE("deriv2 kernel maps sine modes onto the closed-form singular triple") {
  // oracle: high-resolution quadrature of (K v_j)(x) against sigma_j v_j(x)
  const Kernel k = deriv2_kernel();
  for (int j : {1, 2, 5}) {
    const double sigma = 1.0 / std::pow(PI * j, 2.0);
    for (double x : {0.15, 0.5, 0.77}) {
      const double image = integrate_with_breaks(
          [&](double y) { return k.eval(x, y) * std::sqrt(2.0) * std::sin(j * PI * y); }, 0.0,
          1.0, {x}, 1e-13);
      CHECK(image == doctest::Approx(sigma * std::sqrt(2.0) * std::sin(j * PI * x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("gravity kernel values and symmetry") {
  const Kernel k = gravity_kernel(0.25);
  CHECK(k.eval(0.3, 0.3) == doctest::Approx(16.0));
  CHECK(k.eval(0.0, 1.0) == doctest::Approx(0.25 * std::pow(1.0625, -1.5)));
  CHECK(k.eval(0.0, 1.0) == doctest::Approx(0.228269).epsilon(1e-5));
  for (double s : {0.1, 0.4}) CHECK(k.eval(s, 0.9) == doctest::Approx(k.eval(0.9, s)));
  for (double d : {0.1, 0.25, 1.0}) {
    const Kernel kd = gravity_kernel(d);
    CHECK(kd.eval(0.6, 0.6) == doctest::Approx(1.0 / (d * d)));
  }
  CHECK_THROWS_AS(gravity_kernel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gravity_kernel(-1.0), std::invalid_argument);
}

TEST_CASE("heat kernel values and Volterra support") {
  const Kernel k = heat_kernel(1.0);
  CHECK(k.eval(1.0, 0.0) == doctest::Approx(std::exp(-0.25) / (2.0 * std::sqrt(PI))));
  CHECK(k.eval(1.0, 0.0) == doctest::Approx(0.21970).epsilon(1e-4));
  for (double s : {0.0, 0.3, 0.9})
    for (double t : {s, s + 0.05, 1.0})
      if (t >= s) CHECK(k.eval(s, t) == 0.0);
  CHECK(k.eval(1e-9 + 0.5, 0.5) == doctest::Approx(0.0));  // u -> 0+ limit
  CHECK_THROWS_AS(heat_kernel(0.0), std::invalid_argument);
}

TEST_CASE("smoothness bound dominates the kernel sup on a probe grid") {
  for (const auto& name : kernel_names()) {
    const Kernel k = make_kernel(name);
    double sup = 0.0;
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; j <= 100; ++j)
        sup = std::max(sup, std::fabs(k.eval(i / 100.0, j / 100.0)));
    CHECK(k.smoothness_bound >= sup * (1.0 - 1e-9));
  }
}

TEST_CASE("synthetic solution structure") {
  const TrueSolution one = synthetic_solution(0.625, 1);
  CHECK(one(0.0) == doctest::Approx(0.0));
  for (double x : {0.2, 0.5, 0.9})
    CHECK(one(x) == doctest::Approx(std::pow(PI, -1.25) * std::sqrt(2.0) * std::sin(PI * x)));

  // ||f||^2 for s = 1/2, D = 5000 by direct summation
  const TrueSolution f = synthetic_solution(0.5, 5000);
  double oracle = 0.0;
  for (int j = 1; j <= 5000; ++j) oracle += 1.0 / std::pow(PI * j, 2.0);
  CHECK(f.l2_norm() * f.l2_norm() == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(0.16664).epsilon(1e-4));

  CHECK_THROWS_AS(synthetic_solution(-0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(synthetic_solution(0.5, 0), std::invalid_argument);
}

TEST_CASE("grid-vector solutions interpolate their values") {
  const TrueSolution f = grid_vector_solution({1.0, 3.0, 2.0, 0.5});
  CHECK(f(0.0) == 0.0);
  CHECK(f(1.0) == 0.0);
  CHECK(f(0.125) == doctest::Approx(1.0));   // first midpoint knot
  CHECK(f(0.375) == doctest::Approx(3.0));
  CHECK(f(0.25) == doctest::Approx(2.0));    // halfway between knots
  CHECK(f(0.0625) == doctest::Approx(0.5));  // ramp from the zero boundary
  CHECK_THROWS_AS(grid_vector_solution({}), std::invalid_argument);

  // single knot: a tent over (0, 0.5, 1)
  const TrueSolution tent = grid_vector_solution({2.0});
  CHECK(tent(0.5) == doctest::Approx(2.0));
  CHECK(tent(0.25) == doctest::Approx(1.0));
  CHECK(tent(0.75) == doctest::Approx(1.0));
}

TEST_CASE("benchmark profiles") {
  const TrueSolution g = gravity_solution();
  CHECK(g(0.0) == doctest::Approx(0.0));
  CHECK(g(1.0 / 3.0) == doctest::Approx(2.0));
  CHECK(g(0.75) == doctest::Approx(1.0));
  CHECK(g(1.0) == doctest::Approx(0.0));

  const TrueSolution h = heat_solution();
  CHECK(h(0.1) == doctest::Approx(0.75));    // end of the quadratic ramp
  CHECK(h(0.125) == doctest::Approx(1.0));   // bump peak
  CHECK(h(0.15) == doctest::Approx(0.75));   // start of the decay
  CHECK(h(0.6) == 0.0);
  CHECK(h(0.05) == doctest::Approx(0.75 / 4.0));
}
