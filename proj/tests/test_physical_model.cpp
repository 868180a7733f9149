#include <doctest.h>

#include <cmath>
#include <random>

#include "magdimer/model.hpp"
#include "magdimer/params.hpp"

using namespace magdimer;

namespace {

FieldState random_state(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0, scale);
  return {{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
}

// Central differences in long double.
Matrix8<double> fd_jacobian(const FieldState& s, const ModelRates& r) {
  using LD = long double;
  const Quadratures<LD> q0 = to_quadratures(s.cast<LD>());
  Matrix8<double> Jac;
  for (int k = 0; k < 8; ++k) {
    const LD h = 1e-6L * std::max<LD>(1, q0.cwiseAbs().maxCoeff());
    Quadratures<LD> qp = q0, qm = q0;
    qp(k) += h;
    qm(k) -= h;
    Jac.col(k) = ((eom_rhs(qp, r) - eom_rhs(qm, r)) / (2 * h)).cast<double>();
  }
  return Jac;
}

}  // namespace

TEST_CASE("drive amplitude matches the power balance") {
  SystemParams p = reference_params();
  const double omega = drive_amplitude(p);
  const double omega_d = 2 * M_PI * p.nu_d;
  CHECK(omega * omega * kHbar * omega_d == doctest::Approx(2 * 2 * M_PI * p.kappa_m * p.P_d).epsilon(1e-14));
  CHECK(omega == doctest::Approx(2.384e14).epsilon(1e-3));
  CHECK(drive_power_for_amplitude(p, omega) == doctest::Approx(p.P_d).epsilon(1e-14));
  CHECK(drive_amplitude(with_power(p, 0)) == 0);
}

TEST_CASE("rates convert frequencies to angular units") {
  const ModelRates r = derive_rates(reference_params());
  CHECK(r.delta_a == doctest::Approx(-2 * M_PI * 11e6));
  CHECK(r.delta_m == doctest::Approx(-2 * M_PI * 11e6));
  CHECK(r.kappa_a == doctest::Approx(2 * M_PI * 1e6));
  CHECK(r.g == doctest::Approx(2 * M_PI * 7e6));
  CHECK(r.K == doctest::Approx(2 * M_PI * 9e-9));
  CHECK(r.J == doctest::Approx(0.8 * r.kappa_a));
  CHECK(derive_rates(with_tunneling(reference_params(), 2.0)).J == doctest::Approx(2 * r.kappa_a));
}

TEST_CASE("invalid parameters are rejected") {
  SystemParams p = reference_params();
  p.kappa_a = 0;
  CHECK_THROWS_AS(derive_rates(p), ParameterError);
  p = reference_params();
  p.P_d = -1;
  CHECK_THROWS_AS(derive_rates(p), ParameterError);
  p = reference_params();
  p.g = NAN;
  CHECK_THROWS_AS(validate(p), ParameterError);
}

TEST_CASE("drift matrix equals the finite-difference Jacobian") {
  std::mt19937_64 rng(7);
  const ModelRates r = derive_rates(reference_params());
  for (int trial = 0; trial < 20; ++trial) {
    const FieldState s = random_state(rng, 1e7 * (1 + trial));
    const Matrix8<double> A = drift_matrix(s, r);
    const Matrix8<double> F = fd_jacobian(s, r);
    const double scale = A.cwiseAbs().maxCoeff();
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) CHECK(std::abs(A(i, j) - F(i, j)) <= 1e-7 * scale);
  }
}

TEST_CASE("the model is parity equivariant") {
  std::mt19937_64 rng(11);
  const ModelRates r = derive_rates(reference_params());
  const Matrix8<double> P = parity_matrix<double>();
  for (int trial = 0; trial < 10; ++trial) {
    const FieldState s = random_state(rng, 1e7);
    CHECK(eom_rhs(parity(s), r) == parity(eom_rhs(s, r)));
    CHECK((drift_matrix(parity(s), r) - P * drift_matrix(s, r) * P.transpose()).norm() == 0);
  }
}

TEST_CASE("quadrature round trip") {
  std::mt19937_64 rng(3);
  const FieldState s = random_state(rng, 5);
  const Quadratures<double> q = to_quadratures(s);
  CHECK(q(0) == doctest::Approx(std::sqrt(2.0) * s.a_L.real()));
  CHECK(q(7) == doctest::Approx(std::sqrt(2.0) * s.m_R.imag()));
  const FieldState back = from_quadratures(q);
  CHECK(std::abs(back.m_L - s.m_L) < 1e-14 * 5);
}

TEST_CASE("the drive direction is the Omega derivative") {
  const SystemParams p = reference_params();
  std::mt19937_64 rng(5);
  const FieldState s = random_state(rng, 1e6);
  const ModelRates r1 = derive_rates(p);
  ModelRates r2 = r1;
  r2.drive *= 1.5;
  const Quadratures<double> d = (eom_rhs(to_quadratures(s), r2) - eom_rhs(to_quadratures(s), r1)) / (0.5 * r1.drive);
  CHECK((d - drive_direction()).norm() < 1e-6);
}

TEST_CASE("non-finite states are rejected") {
  const ModelRates r = derive_rates(reference_params());
  FieldState s;
  s.m_L = {NAN, 0};
  CHECK_THROWS_AS(eom_rhs(s, r), NumericError);
  CHECK_THROWS_AS(drift_matrix(s, r), NumericError);
}

TEST_CASE("undriven origin is a fixed point") {
  const ModelRates r = derive_rates(with_power(reference_params(), 0));
  const FieldState rhs = eom_rhs(FieldState{}, r);
  CHECK(to_quadratures(rhs).norm() == 0);
}

TEST_CASE("amplitude-phase form follows from the Cartesian form by the chain rule") {
  std::mt19937_64 rng(13);
  const ModelRates r = derive_rates(reference_params());
  for (int trial = 0; trial < 10; ++trial) {
    const FieldState s = random_state(rng, 1e7);
    const FieldState d = eom_rhs(s, r);
    const PolarRates pr = amplitude_phase_rhs(to_polar(s), r);
    auto dn = [](std::complex<double> z, std::complex<double> dz) { return 2 * (std::conj(z) * dz).real(); };
    auto dphase = [](std::complex<double> z, std::complex<double> dz) { return (dz / z).imag(); };
    CHECK(pr.dn_aL == doctest::Approx(dn(s.a_L, d.a_L)).epsilon(1e-9));
    CHECK(pr.dn_mL == doctest::Approx(dn(s.m_L, d.m_L)).epsilon(1e-9));
    CHECK(pr.dn_aR == doctest::Approx(dn(s.a_R, d.a_R)).epsilon(1e-9));
    CHECK(pr.dn_mR == doctest::Approx(dn(s.m_R, d.m_R)).epsilon(1e-9));
    CHECK(pr.dpsi_L == doctest::Approx(dphase(s.a_L, d.a_L)).epsilon(1e-9));
    CHECK(pr.dphi_L == doctest::Approx(dphase(s.m_L, d.m_L)).epsilon(1e-9));
    CHECK(pr.dpsi_R == doctest::Approx(dphase(s.a_R, d.a_R)).epsilon(1e-9));
    CHECK(pr.dphi_R == doctest::Approx(dphase(s.m_R, d.m_R)).epsilon(1e-9));
  }
  PolarState zero = to_polar(FieldState{});
  CHECK_THROWS_AS(amplitude_phase_rhs(zero, r), DomainError);
}
