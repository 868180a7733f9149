#include <doctest.h>

#include <random>

#include "magdimer/cubic.hpp"
#include "magdimer/errors.hpp"

using namespace magdimer;

TEST_CASE("planted roots are recovered") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    double x1 = u(rng), x2 = u(rng), x3 = u(rng);
    const double scale = std::pow(10.0, trial % 15);
    x1 *= scale, x2 *= scale, x3 *= scale;
    const double a = 1.0 / (scale * scale);
    // a (x - x1)(x - x2)(x - x3)
    const auto roots = solve_cubic_positive_roots(a, -a * (x1 + x2 + x3), a * (x1 * x2 + x1 * x3 + x2 * x3),
                                                  -a * x1 * x2 * x3);
    std::vector<double> want{x1, x2, x3};
    std::sort(want.begin(), want.end());
    const double sep = std::min(want[1] - want[0], want[2] - want[1]) / want[2];
    if (sep < 1e-3) continue;
    REQUIRE(roots.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(roots[k] == doctest::Approx(want[k]).epsilon(1e-9));
  }
}

TEST_CASE("single positive root") {
  // (x - 2)(x^2 + 1)
  const auto roots = solve_cubic_positive_roots(1, -2, 1, -2);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(2));
  // (x + 1)(x + 2)(x - 3)
  const auto r2 = solve_cubic_positive_roots(1, 0, -7, -6);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0] == doctest::Approx(3));
}

TEST_CASE("double root is reported once") {
  // (x - 1)^2 (x - 4)
  const auto roots = solve_cubic_positive_roots(1, -6, 9, -4);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(1).epsilon(1e-6));
  CHECK(roots[1] == doctest::Approx(4));
}

TEST_CASE("degenerate polynomials") {
  CHECK_THROWS_AS(solve_cubic_positive_roots(0, 0, 0, 0), DomainError);
  CHECK_THROWS_AS(solve_cubic_positive_roots(0, 1, -3, 2), DomainError);
  const auto q = solve_cubic_positive_roots(0, 1, -3, 2, true);
  REQUIRE(q.size() == 2);
  CHECK(q[0] == doctest::Approx(1));
  CHECK(q[1] == doctest::Approx(2));
  const auto l = solve_cubic_positive_roots(0, 0, 2, -4, true);
  REQUIRE(l.size() == 1);
  CHECK(l[0] == doctest::Approx(2));
}
