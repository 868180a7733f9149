#pragma once

// Gaussian-state metrics in the convention vacuum = I/2, [X, Y] = i.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "magdimer/errors.hpp"

namespace magdimer {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

inline constexpr double kPhysicalityTol = 1e-10;

/// Block-diagonal symplectic form with ((0, 1), (-1, 0)) blocks; `dim` must be even.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> symplectic_form(int dim) {
  if (dim <= 0 || dim % 2 != 0) throw DomainError("symplectic form needs a positive even dimension");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> T =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim, dim);
  for (int k = 0; k < dim; k += 2) {
    T(k, k + 1) = 1;
    T(k + 1, k) = -1;
  }
  return T;
}

/// Symplectic spectrum of any 2n x 2n CM: moduli of the eigenvalues of i T V, each
/// listed once, ascending.
template <typename Derived>
std::vector<typename Derived::Scalar> symplectic_spectrum(const Eigen::MatrixBase<Derived>& V) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(V.rows());
  const auto T = symplectic_form<Scalar>(n);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> TV = T * V;
  Eigen::EigenSolver<decltype(TV)> es(TV, false);
  std::vector<Scalar> mods;
  for (int k = 0; k < n; ++k) mods.push_back(std::abs(es.eigenvalues()(k)));
  std::sort(mods.begin(), mods.end());
  std::vector<Scalar> out;
  for (int k = 0; k < n; k += 2) out.push_back((mods[k] + mods[k + 1]) / 2);
  return out;
}

/// Single-mode symplectic eigenvalue sqrt(det).
template <typename Derived>
typename Derived::Scalar symplectic_eigenvalue(const Eigen::MatrixBase<Derived>& cm) {
  const auto d = cm.determinant();
  if (d < 0) throw NumericError("symplectic eigenvalue: negative determinant (unphysical CM)");
  return std::sqrt(d);
}

/// Two-mode CM in block form (alpha beta; beta^T gamma).
template <typename Scalar>
struct BasicTwoModeCM {
  Matrix2<Scalar> alpha = Matrix2<Scalar>::Identity() / 2;
  Matrix2<Scalar> beta = Matrix2<Scalar>::Zero();
  Matrix2<Scalar> gamma = Matrix2<Scalar>::Identity() / 2;

  Matrix4<Scalar> assembled() const {
    Matrix4<Scalar> V;
    V << alpha, beta, beta.transpose(), gamma;
    return V;
  }

  static BasicTwoModeCM from(const Matrix4<Scalar>& V) {
    return {V.template topLeftCorner<2, 2>(), V.template topRightCorner<2, 2>(),
            V.template bottomRightCorner<2, 2>()};
  }
};

using TwoModeCM = BasicTwoModeCM<double>;

/// Seralian det(alpha) + det(gamma) + 2 det(beta).
template <typename Scalar>
Scalar seralian(const BasicTwoModeCM<Scalar>& tm) {
  return tm.alpha.determinant() + tm.gamma.determinant() + 2 * tm.beta.determinant();
}

struct TwoModeSpectrum {
  double nu_minus = 0.5;
  double nu_plus = 0.5;
};

/// nu_pm = sqrt((S +- sqrt(S^2 - 4 det V)) / 2) with S the seralian.
template <typename Scalar>
TwoModeSpectrum symplectic_eigenvalues(const BasicTwoModeCM<Scalar>& tm) {
  const Scalar det = tm.assembled().determinant();
  if (det < 0) throw NumericError("symplectic eigenvalues: negative determinant (unphysical CM)");
  const Scalar S = seralian(tm);
  const Scalar disc = std::max(Scalar(0), S * S - 4 * det);
  const Scalar plus_sq = (S + std::sqrt(disc)) / 2;
  // nu_+^2 nu_-^2 = det V avoids the cancellation in (S - sqrt(disc)) / 2.
  const Scalar minus_sq = plus_sq > 0 ? det / plus_sq : Scalar(0);
  return {double(std::sqrt(minus_sq)), double(std::sqrt(plus_sq))};
}

/// Throws DomainError when any symplectic eigenvalue is below 1/2 - tol.
template <typename Derived>
void require_physical(const Eigen::MatrixBase<Derived>& V, double tol = kPhysicalityTol) {
  for (auto nu : symplectic_spectrum(V))
    if (nu < 0.5 - tol) throw DomainError("unphysical covariance matrix: symplectic eigenvalue below 1/2");
}

/// Fidelity of two zero-mean single-mode Gaussian states:
/// F = 1 / (sqrt(delta + Lambda) - sqrt(Lambda)), delta = det(alpha + gamma),
/// Lambda = 4 det(alpha + i T / 2) det(gamma + i T / 2).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar gaussian_fidelity(const Eigen::MatrixBase<DerivedA>& alpha,
                                            const Eigen::MatrixBase<DerivedB>& gamma) {
  using Scalar = typename DerivedA::Scalar;
  require_physical(alpha);
  require_physical(gamma);
  const Scalar delta = (alpha + gamma).determinant();
  // det(M + i T / 2) = det M - 1/4 for symmetric 2x2 M.
  const Scalar lambda =
      std::max(Scalar(0), 4 * (alpha.determinant() - Scalar(0.25)) * (gamma.determinant() - Scalar(0.25)));
  // 1 / (sqrt(delta + Lambda) - sqrt(Lambda)) without the cancellation.
  const Scalar F = (std::sqrt(delta + lambda) + std::sqrt(lambda)) / delta;
  const Scalar slack = 1e-12;
  if (!(F <= 1 + slack) || !(F >= -slack)) throw NumericError("gaussian_fidelity: result outside [0, 1]");
  return std::clamp(F, Scalar(0), Scalar(1));
}

/// Von Neumann entropy of a mode with symplectic eigenvalue x:
/// (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2), with f(1/2) = 0.
template <typename Scalar>
Scalar entropy_function(Scalar x) {
  const Scalar lo = x - Scalar(0.5);
  const Scalar hi = x + Scalar(0.5);
  const Scalar low_term = lo > 0 ? lo * std::log(lo) : Scalar(0);
  return hi * std::log(hi) - low_term;
}

/// I = f(nu_alpha) + f(nu_gamma) - f(nu_plus) - f(nu_minus).
template <typename Scalar>
Scalar mutual_information(const BasicTwoModeCM<Scalar>& tm) {
  require_physical(tm.assembled());
  if (tm.beta.isZero(0)) return Scalar(0);
  const Scalar na = symplectic_eigenvalue(tm.alpha);
  const Scalar ng = symplectic_eigenvalue(tm.gamma);
  const auto nu = symplectic_eigenvalues(tm);
  const Scalar I = entropy_function(na) + entropy_function(ng) - entropy_function(Scalar(nu.nu_plus)) -
                   entropy_function(Scalar(nu.nu_minus));
  if (I < Scalar(-1e-12)) throw NumericError("mutual_information: negative result");
  return std::max(Scalar(0), I);
}

/// Smallest symplectic eigenvalue of the partial transpose (det beta sign flipped).
template <typename Scalar>
Scalar partial_transpose_nu_minus(const BasicTwoModeCM<Scalar>& tm) {
  const Scalar det = tm.assembled().determinant();
  const Scalar S = tm.alpha.determinant() + tm.gamma.determinant() - 2 * tm.beta.determinant();
  const Scalar disc = std::max(Scalar(0), S * S - 4 * det);
  const Scalar plus_sq = (S + std::sqrt(disc)) / 2;
  return plus_sq > 0 ? std::sqrt(det / plus_sq) : Scalar(0);
}

/// E_N = max(0, -ln(2 nu_tilde_minus)).
template <typename Scalar>
Scalar logarithmic_negativity(const BasicTwoModeCM<Scalar>& tm) {
  require_physical(tm.assembled());
  return std::max(Scalar(0), -std::log(2 * partial_transpose_nu_minus(tm)));
}

}  // namespace magdimer
