#include <doctest.h>

#include <algorithm>
#include <random>

#include "magdimer/model.hpp"
#include "magdimer/steady_state.hpp"

using namespace magdimer;

namespace {

double residual(const FieldState& s, const ModelRates& r) {
  return eom_rhs(to_quadratures(s), r).norm() / r.drive;
}

double distance(const FieldState& a, const FieldState& b) {
  return (to_quadratures(a) - to_quadratures(b)).norm();
}

}  // namespace

TEST_CASE("symmetric roots are fixed points of the full model") {
  for (double P : {5e-3, 30e-3, 80e-3}) {
    const ModelRates r = derive_rates(with_power(reference_params(), P));
    for (double n : symmetric_occupations(r)) {
      const FieldState s = symmetric_state(n, r);
      CHECK(s.n_mL() == doctest::Approx(n).epsilon(1e-10));
      CHECK(residual(s, r) < 1e-10 * r.kappa_a);
    }
  }
}

TEST_CASE("three symmetric roots at the reference power") {
  const ModelRates r = derive_rates(reference_params());
  const auto n = symmetric_occupations(r);
  REQUIRE(n.size() == 3);
  CHECK(n[0] == doctest::Approx(3.53e13).epsilon(1e-2));
  CHECK(n[2] == doctest::Approx(4.48e14).epsilon(1e-2));
}

TEST_CASE("effective detuning depends on Delta_a - J only") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.7, 3);
  const SystemParams base = reference_params();
  const auto n0 = symmetric_occupations(derive_rates(base));
  for (int k = 0; k < 10; ++k) {
    const double d = u(rng);  // in units of kappa_a
    SystemParams p = base;
    p.J = base.J + d;
    const double shift = (p.J - base.J) * base.kappa_a;
    p.nu_a = base.nu_a + shift;
    const auto n = symmetric_occupations(derive_rates(p));
    REQUIRE(n.size() == n0.size());
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n[i] == doctest::Approx(n0[i]).epsilon(1e-9));
  }
}

TEST_CASE("bistability criterion") {
  const ModelRates r = derive_rates(reference_params());
  const auto c = bistability_criterion(r);
  CHECK(c.positive);
  CHECK(c.bistable);
  SystemParams p = reference_params();
  p.kappa_m = 10e6;
  const auto c2 = bistability_criterion(derive_rates(p));
  CHECK_FALSE(c2.positive);
  CHECK_FALSE(c2.bistable);
  p = reference_params();
  p.K = -p.K;
  const auto c3 = bistability_criterion(derive_rates(p));
  CHECK(c3.positive);
  CHECK_FALSE(c3.bistable);
}

TEST_CASE("four attractors at the reference point") {
  const ModelRates r = derive_rates(reference_params());
  const auto fps = find_all_fixed_points(r);
  CHECK(fps.size() == 9);
  std::vector<BranchClass> stable;
  for (const auto& fp : fps) {
    CHECK(residual(fp.state, r) < 1e-9);
    if (fp.stable()) stable.push_back(fp.branch_class);
  }
  std::sort(stable.begin(), stable.end());
  CHECK(stable == std::vector<BranchClass>{BranchClass::SymLow, BranchClass::SymHigh, BranchClass::AsymLowHigh,
                                           BranchClass::AsymHighLow});
  for (const auto& fp : fps) {
    if (fp.stable()) CHECK(fp.max_re_eigenvalue() == doctest::Approx(-r.kappa_a).epsilon(1e-6));
  }
}

TEST_CASE("fixed point set is closed under parity") {
  const ModelRates r = derive_rates(reference_params());
  const auto fps = find_all_fixed_points(r);
  const double scale = amplitude_scale(r);
  for (const auto& fp : fps) {
    const FieldState mirror = parity(fp.state);
    const bool found = std::any_of(fps.begin(), fps.end(), [&](const FixedPoint& o) {
      return distance(o.state, mirror) < 1e-6 * scale;
    });
    CHECK(found);
    if (fp.branch_class == BranchClass::AsymLowHigh) CHECK(fp.imbalance_Z < 0);
    if (fp.branch_class == BranchClass::AsymHighLow) CHECK(fp.imbalance_Z > 0);
  }
}

TEST_CASE("dense random seeds find nothing the multistart missed") {
  const ModelRates r = derive_rates(reference_params());
  const auto fps = find_all_fixed_points(r);
  const double scale = amplitude_scale(r);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  int converged = 0;
  for (int k = 0; k < 600; ++k) {
    FieldState seed{{u(rng) * scale / 2, u(rng) * scale / 2},
                    {u(rng) * scale, u(rng) * scale},
                    {u(rng) * scale / 2, u(rng) * scale / 2},
                    {u(rng) * scale, u(rng) * scale}};
    const auto x = newton_fixed_point(seed, r);
    if (!x) continue;
    ++converged;
    const bool known = std::any_of(fps.begin(), fps.end(),
                                   [&](const FixedPoint& o) { return distance(o.state, *x) < 1e-5 * scale; });
    CHECK(known);
  }
  CHECK(converged > 100);
}

TEST_CASE("asymmetric fixed points satisfy their per-side cubics") {
  const ModelRates r = derive_rates(reference_params());
  for (const auto& fp : find_all_fixed_points(r)) {
    if (!is_asymmetric(fp.branch_class)) continue;
    const auto coeffs = asymmetric_cubic_coefficients(fp.state, r);
    const double n[2] = {fp.state.n_mL(), fp.state.n_mR()};
    for (int side = 0; side < 2; ++side) {
      const auto& c = coeffs[side];
      const double x = n[side];
      const double value = ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
      CHECK(std::abs(value) < 1e-8 * std::abs(c[3]));
    }
  }
}

TEST_CASE("symmetric effective parameters reduce to the mirror case") {
  const ModelRates r = derive_rates(reference_params());
  const auto sym = symmetric_effective_params(r);
  for (const auto& fp : symmetric_steady_states(r)) {
    const auto e = asymmetric_effective_params(fp.state, r);
    CHECK(e.f == doctest::Approx(1));
    CHECK(e.Delta_tilde_m[0] == doctest::Approx(sym.Delta0).epsilon(1e-9));
    CHECK(e.kappa_tilde_m[1] == doctest::Approx(sym.kappa0).epsilon(1e-9));
  }
}

TEST_CASE("single symmetric state away from the window") {
  const ModelRates lo = derive_rates(with_power(reference_params(), 2e-3));
  const auto a = find_all_fixed_points(lo);
  REQUIRE(a.size() == 1);
  CHECK(a[0].branch_class == BranchClass::SymLow);
  CHECK(a[0].stable());
  const ModelRates hi = derive_rates(with_power(reference_params(), 200e-3));
  const auto b = find_all_fixed_points(hi);
  REQUIRE(b.size() == 1);
  CHECK(b[0].branch_class == BranchClass::SymHigh);
}

TEST_CASE("undriven system relaxes to the origin") {
  const ModelRates r = derive_rates(with_power(reference_params(), 0));
  const auto fps = find_all_fixed_points(r);
  REQUIRE(fps.size() == 1);
  CHECK(to_quadratures(fps[0].state).norm() == 0);
  CHECK(fps[0].stable());
  CHECK_THROWS_AS(population_imbalance(FieldState{}), DomainError);
}

TEST_CASE("multistart is deterministic for a fixed seed") {
  const ModelRates r = derive_rates(reference_params());
  const auto a = find_all_fixed_points(r);
  const auto b = find_all_fixed_points(r);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].state == b[i].state);
}
