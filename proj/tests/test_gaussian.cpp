#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "magdimer/gaussian.hpp"

using namespace magdimer;

namespace {

Matrix2<double> rotation(double t) {
  Matrix2<double> R;
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

// Thermal-squeezed single-mode CM: (nbar + 1/2) R diag(e^-2r, e^2r) R^T.
Matrix2<double> single_mode_cm(double nbar, double r, double theta) {
  const Matrix2<double> R = rotation(theta);
  return (nbar + 0.5) * R * Eigen::Vector2d(std::exp(-2 * r), std::exp(2 * r)).asDiagonal() * R.transpose();
}

Matrix2<double> random_symplectic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double s = u(rng);
  return rotation(3 * u(rng)) * Eigen::Vector2d(std::exp(s), std::exp(-s)).asDiagonal() * rotation(3 * u(rng));
}

TwoModeCM two_mode_squeezed(double r, double nbar = 0) {
  const double a = (nbar + 0.5) * std::cosh(2 * r), c = (nbar + 0.5) * std::sinh(2 * r);
  TwoModeCM tm;
  tm.alpha = a * Matrix2<double>::Identity();
  tm.gamma = tm.alpha;
  tm.beta << c, 0, 0, -c;
  return tm;
}

// Density matrix of the same state in a truncated Fock basis.
Eigen::MatrixXcd fock_state(double nbar, double r, double theta, int N) {
  using M = Eigen::MatrixXcd;
  M a = M::Zero(N, N);
  for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(double(n));
  const M ad = a.adjoint();
  M rho = M::Zero(N, N);
  const double q = nbar / (nbar + 1);
  for (int n = 0; n < N; ++n) rho(n, n) = std::pow(q, n) / (nbar + 1);
  const M S = (0.5 * r * (a * a - ad * ad)).exp();
  M Rot = M::Zero(N, N);
  for (int n = 0; n < N; ++n) Rot(n, n) = std::polar(1.0, -theta * n);
  const M U = Rot * S;
  return U * rho * U.adjoint();
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0).cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

double uhlmann(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  const Eigen::MatrixXcd s = psd_sqrt(rho);
  const double t = psd_sqrt(s * sigma * s).trace().real();
  return t * t;
}

}  // namespace

TEST_CASE("closed-form fidelities") {
  const Matrix2<double> vac = Matrix2<double>::Identity() / 2;
  CHECK(std::abs(gaussian_fidelity(vac, single_mode_cm(0, 1, 0)) - 1 / std::cosh(1.0)) < 1e-10);
  CHECK(std::abs(gaussian_fidelity(vac, single_mode_cm(1, 0, 0)) - 0.5) < 1e-10);
  CHECK(gaussian_fidelity(vac, vac) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fidelity agrees with the Uhlmann fidelity in Fock space") {
  const int N = 90;
  struct Case { double n1, r1, t1, n2, r2, t2; };
  for (const Case& c : {Case{0, 0.3, 0, 0.5, 0, 0}, Case{0.2, 0.4, 0.3, 0.7, 0.1, 1.2},
                        Case{1.0, 0.2, 0, 0.3, 0.5, 0.8}}) {
    const double want = uhlmann(fock_state(c.n1, c.r1, c.t1, N), fock_state(c.n2, c.r2, c.t2, N));
    const double got = gaussian_fidelity(single_mode_cm(c.n1, c.r1, c.t1), single_mode_cm(c.n2, c.r2, c.t2));
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("fidelity is symmetric and bounded") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 200; ++k) {
    const Matrix2<double> A = single_mode_cm(2 * u(rng), u(rng), 6 * u(rng));
    const Matrix2<double> B = single_mode_cm(2 * u(rng), u(rng), 6 * u(rng));
    const double f = gaussian_fidelity(A, B);
    CHECK(f == doctest::Approx(gaussian_fidelity(B, A)).epsilon(1e-13));
    CHECK(f >= 0);
    CHECK(f <= 1);
    CHECK(gaussian_fidelity(A, A) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("symplectic eigenvalues") {
  CHECK(symplectic_eigenvalue(single_mode_cm(1.5, 0.7, 0.2)) == doctest::Approx(2.0));
  const auto nu = symplectic_eigenvalues(two_mode_squeezed(0.8, 0.3));
  CHECK(nu.nu_minus == doctest::Approx(0.8));
  CHECK(nu.nu_plus == doctest::Approx(0.8));
  const auto full = symplectic_spectrum(two_mode_squeezed(0.8, 0.3).assembled());
  REQUIRE(full.size() == 2);
  CHECK(full[0] == doctest::Approx(0.8));
}

TEST_CASE("entropy function") {
  CHECK(entropy_function(0.5) == 0);
  const double nbar = 1.3;
  const double want = (nbar + 1) * std::log(nbar + 1) - nbar * std::log(nbar);
  CHECK(entropy_function(nbar + 0.5) == doctest::Approx(want));
}

TEST_CASE("mutual information") {
  TwoModeCM product;
  product.alpha = single_mode_cm(0.4, 0.2, 0.1);
  product.gamma = single_mode_cm(1.1, 0.5, 2.0);
  CHECK(mutual_information(product) <= 1e-12);

  // Standard form: alpha = gamma = a I, beta = diag(c, -c).
  for (double r : {0.1, 0.5, 1.0}) {
    const TwoModeCM tm = two_mode_squeezed(r, 0.7);
    const double a = tm.alpha(0, 0), c = tm.beta(0, 0);
    const double want = 2 * entropy_function(a) - 2 * entropy_function(std::sqrt(a * a - c * c));
    CHECK(mutual_information(tm) == doctest::Approx(want).epsilon(1e-10));
  }
  // Pure two-mode squeezed vacuum: I = 2 S(alpha).
  const TwoModeCM pure = two_mode_squeezed(0.6);
  CHECK(mutual_information(pure) == doctest::Approx(2 * entropy_function(std::cosh(1.2) / 2)).epsilon(1e-7));
}

TEST_CASE("mutual information is invariant under local symplectics") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    TwoModeCM tm = two_mode_squeezed(0.3 + 0.05 * k, 0.2);
    tm.alpha += 0.1 * Matrix2<double>::Identity();
    const double before = mutual_information(tm);
    const Matrix2<double> S1 = random_symplectic(rng), S2 = random_symplectic(rng);
    REQUIRE(S1.determinant() == doctest::Approx(1.0));
    TwoModeCM moved{S1 * tm.alpha * S1.transpose(), S1 * tm.beta * S2.transpose(), S2 * tm.gamma * S2.transpose()};
    CHECK(mutual_information(moved) == doctest::Approx(before).epsilon(1e-9));
  }
}

TEST_CASE("logarithmic negativity") {
  for (double r : {0.1, 0.5, 1.0}) CHECK(std::abs(logarithmic_negativity(two_mode_squeezed(r)) - 2 * r) < 1e-9);
  TwoModeCM product;
  CHECK(logarithmic_negativity(product) == 0);
  // Enough thermal noise destroys the entanglement.
  CHECK(logarithmic_negativity(two_mode_squeezed(0.2, 2.0)) == 0);
}

TEST_CASE("unphysical covariance matrices are rejected") {
  const Matrix2<double> bad = 0.1 * Matrix2<double>::Identity();
  CHECK_THROWS_AS(gaussian_fidelity(bad, bad), DomainError);
  TwoModeCM tm;
  tm.alpha = bad;
  CHECK_THROWS_AS(mutual_information(tm), DomainError);
  CHECK_THROWS_AS(logarithmic_negativity(tm), DomainError);
}

TEST_CASE("metrics work in extended precision") {
  using LD = long double;
  const Matrix2<LD> vac = Matrix2<LD>::Identity() / 2;
  Matrix2<LD> th = Matrix2<LD>::Identity() * LD(1.5);
  CHECK(std::abs(double(gaussian_fidelity(vac, th)) - 0.5) < 1e-15);
}
