#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "magdimer/fluctuations.hpp"
#include "magdimer/model.hpp"
#include "magdimer/steady_state.hpp"

using namespace magdimer;

namespace {

// V = int_0^inf exp(A t) D exp(A^T t) dt by composite Simpson on [0, T].
Eigen::MatrixXd lyapunov_integral(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D, double T, int steps) {
  const double h = T / steps;
  const Eigen::MatrixXd step = (A * h).exp();
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 1 : (k % 2 ? 4 : 2);
    V += w * E * D * E.transpose();
    E = step * E;
  }
  return V * h / 3;
}

}  // namespace

TEST_CASE("Lyapunov solution matches the integral representation") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd A(6, 6), B(6, 6);
    for (int i = 0; i < 36; ++i) A(i) = n(rng), B(i) = n(rng);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    A -= (es.eigenvalues().real().maxCoeff() + 0.5) * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::MatrixXd D = B * B.transpose();
    const Eigen::MatrixXd V = solve_lyapunov(A, D);
    const Eigen::MatrixXd W = lyapunov_integral(A, D, 60, 24000);
    CHECK((V - W).norm() <= 1e-7 * W.norm());
    CHECK(lyapunov_residual(A, V, D) < 1e-12);
  }
}

TEST_CASE("Lyapunov solver rejects unstable drift") {
  Eigen::Matrix2d A;
  A << 0.1, 1, -1, 0.1;
  CHECK_THROWS_AS(solve_lyapunov(A, Eigen::Matrix2d::Identity()), SolverError);
}

TEST_CASE("decoupled resonators sit in the vacuum") {
  SystemParams p = reference_params();
  p.g = 0;
  p.K = 0;
  p.J = 0;
  const ModelRates r = derive_rates(p);
  const auto fps = find_all_fixed_points(r);
  REQUIRE(fps.size() == 1);
  const FluctuationReport f = analyze_fluctuations(fps[0].state, r);
  CHECK((f.covariance - Matrix8<double>::Identity() / 2).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(f.mutual_information == 0);
}

TEST_CASE("covariances at the reference attractors") {
  const ModelRates r = derive_rates(reference_params());
  const Matrix8<double> P = parity_matrix<double>();
  for (const auto& fp : find_all_fixed_points(r)) {
    if (!fp.stable()) {
      CHECK_THROWS_AS(analyze_fluctuations(fp.state, r), SolverError);
      continue;
    }
    const FluctuationReport f = analyze_fluctuations(fp.state, r);
    CHECK(f.lyapunov_residual <= 1e-8);
    for (double nu : symplectic_spectrum(f.covariance)) CHECK(nu >= 0.5 - 1e-10);
    CHECK(f.mutual_information >= 0);
    CHECK(f.log_negativity <= 1e-12);
    if (is_symmetric(fp.branch_class)) {
      CHECK((P * f.covariance * P.transpose() - f.covariance).norm() <= 1e-9 * f.covariance.norm());
      CHECK(f.infidelity < 1e-9);
    } else {
      CHECK(f.infidelity > 0);
    }
  }
}

TEST_CASE("no tunneling, no magnon correlations") {
  const ModelRates r = derive_rates(with_tunneling(reference_params(), 0));
  for (const auto& fp : find_all_fixed_points(r)) {
    if (!fp.stable()) continue;
    const FluctuationReport f = analyze_fluctuations(fp.state, r);
    CHECK(f.magnons.beta.norm() == 0);
    CHECK(f.mutual_information == 0);
  }
}

TEST_CASE("cross-state infidelity pairs left and right magnons of different attractors") {
  const ModelRates r = derive_rates(reference_params());
  std::vector<FluctuationReport> reports;
  std::vector<FixedPoint> stable;
  for (const auto& fp : find_all_fixed_points(r))
    if (fp.stable()) stable.push_back(fp), reports.push_back(analyze_fluctuations(fp.state, r));
  REQUIRE(reports.size() == 4);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(cross_infidelity(reports[i], reports[i]) == doctest::Approx(reports[i].infidelity));
    for (std::size_t j = 0; j < reports.size(); ++j) {
      const double x = cross_infidelity(reports[i], reports[j]);
      CHECK(x >= 0);
      CHECK(x <= 1);
    }
  }
}
