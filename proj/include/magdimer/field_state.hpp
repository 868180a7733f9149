#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "magdimer/errors.hpp"

namespace magdimer {

enum class Side { Left, Right };

/// Eight real quadratures ordered (X_aL, Y_aL, X_mL, Y_mL, X_aR, Y_aR, X_mR, Y_mR).
template <typename Scalar>
using Quadratures = Eigen::Matrix<Scalar, 8, 1>;

template <typename Scalar>
using Matrix8 = Eigen::Matrix<Scalar, 8, 8>;

/// Complex mode amplitudes of both resonators; |a|^2 and |m|^2 are excitation numbers.
template <typename Scalar>
struct BasicFieldState {
  using Complex = std::complex<Scalar>;

  Complex a_L{};
  Complex m_L{};
  Complex a_R{};
  Complex m_R{};

  Complex& cavity(Side s) { return s == Side::Left ? a_L : a_R; }
  Complex& magnon(Side s) { return s == Side::Left ? m_L : m_R; }
  const Complex& cavity(Side s) const { return s == Side::Left ? a_L : a_R; }
  const Complex& magnon(Side s) const { return s == Side::Left ? m_L : m_R; }

  Scalar n_aL() const { return std::norm(a_L); }
  Scalar n_aR() const { return std::norm(a_R); }
  Scalar n_mL() const { return std::norm(m_L); }
  Scalar n_mR() const { return std::norm(m_R); }

  bool finite() const {
    using std::isfinite;
    for (const Complex* c : {&a_L, &m_L, &a_R, &m_R})
      if (!isfinite(c->real()) || !isfinite(c->imag())) return false;
    return true;
  }

  template <typename Other>
  BasicFieldState<Other> cast() const {
    using C = std::complex<Other>;
    auto conv = [](const Complex& z) { return C(Other(z.real()), Other(z.imag())); };
    return {conv(a_L), conv(m_L), conv(a_R), conv(m_R)};
  }

  friend bool operator==(const BasicFieldState&, const BasicFieldState&) = default;
};

using FieldState = BasicFieldState<double>;

/// L <-> R exchange.
template <typename Scalar>
BasicFieldState<Scalar> parity(const BasicFieldState<Scalar>& s) {
  return {s.a_R, s.m_R, s.a_L, s.m_L};
}

/// X = sqrt(2) Re(amplitude), Y = sqrt(2) Im(amplitude).
template <typename Scalar>
Quadratures<Scalar> to_quadratures(const BasicFieldState<Scalar>& s) {
  const Scalar r2 = std::sqrt(Scalar(2));
  Quadratures<Scalar> q;
  q << r2 * s.a_L.real(), r2 * s.a_L.imag(), r2 * s.m_L.real(), r2 * s.m_L.imag(),
      r2 * s.a_R.real(), r2 * s.a_R.imag(), r2 * s.m_R.real(), r2 * s.m_R.imag();
  return q;
}

template <typename Derived>
BasicFieldState<typename Derived::Scalar> from_quadratures(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  using C = std::complex<Scalar>;
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  return {C(s * q(0), s * q(1)), C(s * q(2), s * q(3)), C(s * q(4), s * q(5)),
          C(s * q(6), s * q(7))};
}

/// Parity as an 8x8 permutation swapping the L and R 4-blocks.
template <typename Scalar = double>
Matrix8<Scalar> parity_matrix() {
  Matrix8<Scalar> P = Matrix8<Scalar>::Zero();
  P.template block<4, 4>(0, 4).setIdentity();
  P.template block<4, 4>(4, 0).setIdentity();
  return P;
}

/// Occupation / phase representation, phases in (-pi, pi].
struct PolarState {
  double n_aL = 0, n_mL = 0, n_aR = 0, n_mR = 0;
  double psi_L = 0, phi_L = 0, psi_R = 0, phi_R = 0;
};

/// Time derivative of a PolarState.
struct PolarRates {
  double dn_aL = 0, dn_mL = 0, dn_aR = 0, dn_mR = 0;
  double dpsi_L = 0, dphi_L = 0, dpsi_R = 0, dphi_R = 0;
};

inline PolarState to_polar(const FieldState& s) {
  return {std::norm(s.a_L), std::norm(s.m_L), std::norm(s.a_R), std::norm(s.m_R),
          std::arg(s.a_L),  std::arg(s.m_L),  std::arg(s.a_R),  std::arg(s.m_R)};
}

inline FieldState from_polar(const PolarState& p) {
  if (p.n_aL < 0 || p.n_mL < 0 || p.n_aR < 0 || p.n_mR < 0)
    throw DomainError("negative occupation in polar state");
  return {std::polar(std::sqrt(p.n_aL), p.psi_L), std::polar(std::sqrt(p.n_mL), p.phi_L),
          std::polar(std::sqrt(p.n_aR), p.psi_R), std::polar(std::sqrt(p.n_mR), p.phi_R)};
}

}  // namespace magdimer
