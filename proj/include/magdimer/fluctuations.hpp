#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "magdimer/errors.hpp"
#include "magdimer/field_state.hpp"
#include "magdimer/gaussian.hpp"
#include "magdimer/params.hpp"

namespace magdimer {

/// Steady-state covariance V solving A V + V A^T = -D, symmetrized.
///
/// Uses the Kronecker form (I (x) A + A (x) I) vec V = -vec D, which is small
/// for the 8x8 problem and keeps exact zeros for block-diagonal A and D.
/// Throws SolverError if A is not Hurwitz.
template <typename DerivedA, typename DerivedD>
Eigen::Matrix<typename DerivedA::Scalar, DerivedA::RowsAtCompileTime, DerivedA::ColsAtCompileTime>
solve_lyapunov(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedD>& D) {
  using Scalar = typename DerivedA::Scalar;
  using Result = Eigen::Matrix<Scalar, DerivedA::RowsAtCompileTime, DerivedA::ColsAtCompileTime>;
  using Dyn = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = A.rows();
  if (A.cols() != n || D.rows() != n || D.cols() != n)
    throw DomainError("solve_lyapunov: dimension mismatch");
  if (!A.allFinite() || !D.allFinite()) throw NumericError("solve_lyapunov: non-finite input");

  Eigen::EigenSolver<Dyn> es(Dyn(A), false);
  if (es.eigenvalues().real().maxCoeff() >= 0)
    throw SolverError("unstable fixed point: covariance undefined");

  const Dyn I = Dyn::Identity(n, n);
  Dyn L(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      L.block(i * n, j * n, n, n) = (i == j ? Dyn(A) : Dyn::Zero(n, n)) + A(i, j) * I;
  Dyn rhs = -D;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v =
      Eigen::PartialPivLU<Dyn>(L).solve(Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(rhs.data(), n * n));
  Result V = Eigen::Map<const Dyn>(v.data(), n, n);
  return (V + V.transpose()) / 2;
}

/// ||A V + V A^T + D||_F / ||D||_F.
template <typename DA, typename DV, typename DD>
double lyapunov_residual(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DV>& V,
                         const Eigen::MatrixBase<DD>& D) {
  return double((A * V + V * A.transpose() + D).norm() / D.norm());
}

/// Left magnon (rows 3-4), right magnon (rows 7-8) and their cross block.
template <typename Derived>
BasicTwoModeCM<typename Derived::Scalar> reduce_to_magnons(const Eigen::MatrixBase<Derived>& V) {
  return {V.template block<2, 2>(2, 2), V.template block<2, 2>(2, 6), V.template block<2, 2>(6, 6)};
}

struct FluctuationReport {
  Matrix8<double> covariance;
  TwoModeCM magnons;
  double fidelity = 1;            // left vs right magnon of the same state
  double infidelity = 0;
  double mutual_information = 0;
  double log_negativity = 0;
  double nu_plus = 0.5;
  double nu_minus = 0.5;
  double lyapunov_residual = 0;   // relative to ||D||_F
};

/// Full Gaussian analysis around a stable fixed point.
FluctuationReport analyze_fluctuations(const FieldState& fixed_point, const ModelRates& r);

/// 1 - F(alpha of `left_from`, gamma of `right_from`), pairing two coexisting states.
double cross_infidelity(const FluctuationReport& left_from, const FluctuationReport& right_from);

}  // namespace magdimer
