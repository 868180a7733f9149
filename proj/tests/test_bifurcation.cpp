#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "magdimer/bifurcation.hpp"
#include "magdimer/model.hpp"

using namespace magdimer;

namespace {

// Turning points of Omega^2(n) = 4K^2 n^3 + 4 K D0 n^2 + (D0^2 + k0^2) n.
std::vector<double> analytic_symmetric_folds(const SystemParams& p) {
  const ModelRates r = derive_rates(p);
  const auto e = symmetric_effective_params(r);
  const double a = 12 * r.K * r.K, b = 8 * r.K * e.Delta0, c = e.Delta0 * e.Delta0 + e.kappa0 * e.kappa0;
  const double disc = b * b - 4 * a * c;
  std::vector<double> out;
  if (disc <= 0) return out;
  for (double n : {(-b - std::sqrt(disc)) / (2 * a), (-b + std::sqrt(disc)) / (2 * a)}) {
    const double omega2 = ((4 * r.K * r.K * n + 4 * r.K * e.Delta0) * n + c) * n;
    out.push_back(drive_power_for_amplitude(p, std::sqrt(omega2)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

const FixedPoint& first_of(const std::vector<FixedPoint>& fps, BranchClass c) {
  for (const auto& fp : fps)
    if (fp.branch_class == c && fp.stable()) return fp;
  FAIL("no stable fixed point of class " << to_string(c));
  return fps.front();
}

}  // namespace

TEST_CASE("symmetric folds match the turning points of the cubic") {
  for (double J : {0.2, 0.8, 2.0}) {
    const SystemParams p = with_tunneling(reference_params(), J);
    const auto want = analytic_symmetric_folds(p);
    REQUIRE(want.size() == 2);
    const auto sym = symmetric_steady_states(derive_rates(p));
    const BranchCurve curve = trace_branch(sym.front(), p, 1e-3, 150e-3);
    std::vector<double> got;
    for (const auto& f : curve.fold_points) {
      CHECK(f.corroborated);
      got.push_back(f.P_d);
    }
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == 2);
    CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-7));
    CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-7));
  }
}

TEST_CASE("continuation samples are fixed points") {
  const SystemParams p = reference_params();
  const auto fps = find_all_fixed_points(derive_rates(p));
  const BranchCurve curve = trace_branch(first_of(fps, BranchClass::AsymLowHigh), p, 1e-3, 100e-3);
  CHECK(curve.closed);
  CHECK_FALSE(curve.truncated);
  for (const auto& s : curve.samples) {
    const ModelRates r = derive_rates(with_power(p, s.P_d));
    CHECK(eom_rhs(to_quadratures(s.fp.state), r).norm() < 1e-8 * r.drive);
  }
}

TEST_CASE("asymmetric window is nested in the symmetric window") {
  const SystemParams p = reference_params();
  const auto fps = find_all_fixed_points(derive_rates(p));
  const auto low = trace_branch(first_of(fps, BranchClass::SymLow), p, 1e-3, 100e-3);
  const auto asym = fold_window(trace_branch(first_of(fps, BranchClass::AsymHighLow), p, 1e-3, 100e-3));
  REQUIRE(asym);
  // The high branch ends at the lower fold; the low branch at the upper one.
  std::vector<double> sym_folds;
  for (const auto& f : low.fold_points) sym_folds.push_back(f.P_d);
  std::sort(sym_folds.begin(), sym_folds.end());
  REQUIRE(sym_folds.size() == 2);
  CHECK(sym_folds[0] < asym->lower);
  CHECK(asym->upper < sym_folds[1]);
  CHECK(asym->lower == doctest::Approx(16.540984e-3).epsilon(1e-6));
  CHECK(asym->upper == doctest::Approx(42.411619e-3).epsilon(1e-6));
}

TEST_CASE("asymmetric window edges agree with the fixed-point census") {
  const SystemParams p = reference_params();
  const auto fps = find_all_fixed_points(derive_rates(p));
  const auto w = fold_window(trace_branch(first_of(fps, BranchClass::AsymLowHigh), p, 1e-3, 100e-3));
  REQUIRE(w);
  auto asym_stable = [&](double P) {
    return evaluate_phase_point(with_power(p, P)).n_asym_stable;
  };
  CHECK(asym_stable(w->lower * (1 - 1e-4)) == 0);
  CHECK(asym_stable(w->lower * (1 + 1e-4)) == 2);
  CHECK(asym_stable(w->upper * (1 - 1e-4)) == 2);
  CHECK(asym_stable(w->upper * (1 + 1e-4)) == 0);
}

TEST_CASE("Hopf detection on synthetic spectra") {
  std::vector<double> mu;
  std::vector<Eigen::VectorXcd> spectra;
  for (int k = 0; k <= 10; ++k) {
    const double m = 0.1 * k;
    Eigen::VectorXcd ev(3);
    ev << std::complex<double>(m - 0.55, 2.0), std::complex<double>(m - 0.55, -2.0), std::complex<double>(-1, 0);
    mu.push_back(m);
    spectra.push_back(ev);
  }
  const auto h = detect_hopf_crossings(mu, spectra, 1e-6);
  REQUIRE(h.size() == 1);
  CHECK(h[0].parameter == doctest::Approx(0.55));
  CHECK(h[0].frequency == doctest::Approx(2.0));

  // A real eigenvalue crossing is not a Hopf point.
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    spectra[k](0) = {mu[k] - 0.55, 0};
    spectra[k](1) = {-2, 0};
  }
  CHECK(detect_hopf_crossings(mu, spectra, 1e-6).empty());
}

TEST_CASE("upper symmetric branch loses stability by Hopf at strong tunneling") {
  const SystemParams p = with_power(with_tunneling(reference_params(), 2.0), 100e-3);
  const auto fps = find_all_fixed_points(derive_rates(p));
  const auto& top = fps.back();
  CHECK(top.branch_class == BranchClass::SymHigh);
  const BranchCurve curve = trace_branch(top, p, 1e-3, 100e-3);
  const auto hopf = detect_hopf(curve);
  CHECK_FALSE(hopf.empty());
  for (const auto& h : hopf) CHECK(h.frequency > 0);
}

TEST_CASE("region labels") {
  CHECK(classify_region(1, 0) == Region::Mono1S);
  CHECK(classify_region(2, 0) == Region::Bi2S);
  CHECK(classify_region(4, 2) == Region::Multi2S2AS);
  CHECK(classify_region(0, 0) == Region::None0S);
  CHECK(classify_region(3, 2) == Region::Other);
  CHECK(to_string(Region::Multi2S2AS) == "2S-2AS");
}

TEST_CASE("phase points along the reference scan") {
  const SystemParams p = reference_params();
  CHECK(evaluate_phase_point(with_power(p, 5e-3)).region == Region::Mono1S);
  CHECK(evaluate_phase_point(with_power(p, 15e-3)).region == Region::Bi2S);
  CHECK(evaluate_phase_point(with_power(p, 30e-3)).region == Region::Multi2S2AS);
  CHECK(evaluate_phase_point(with_power(p, 50e-3)).region == Region::Bi2S);
  CHECK(evaluate_phase_point(with_power(p, 80e-3)).region == Region::Mono1S);
  const PhasePoint pt = evaluate_phase_point(p);
  CHECK(pt.max_abs_Z == doctest::Approx(0.7647).epsilon(1e-3));
}

TEST_CASE("boundary refinement") {
  const double edge = refine_boundary([](double P) { return P > 0.3; }, 0.0, 1.0, 1e-10);
  CHECK(edge == doctest::Approx(0.3).epsilon(1e-9));
  CHECK_THROWS_AS(refine_boundary([](double) { return true; }, 0.0, 1.0), DomainError);
}

TEST_CASE("phase diagram layout") {
  const auto d = sweep_phase_diagram(reference_params(), {10e-3, 30e-3, 70e-3}, {0.5, 1.0});
  REQUIRE(d.cells.size() == 6);
  CHECK(d.at(1, 2).J == 1.0);
  CHECK(d.at(1, 2).P_d == 70e-3);
  CHECK(d.at(0, 1).region == Region::Multi2S2AS);
  CHECK_THROWS_AS(sweep_phase_diagram(reference_params(), {2e-3, 1e-3}, {1.0}), ParameterError);
}
