#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "magdimer/errors.hpp"
#include "magdimer/field_state.hpp"
#include "magdimer/params.hpp"

namespace magdimer {

/// Right-hand side of the semiclassical Langevin equations in the drive frame:
///
///   da_i/dt = -(i Delta_a + kappa_a) a_i - i g m_i + i J a_ibar
///   dm_i/dt = -(i Delta_m + kappa_m) m_i - i g a_i - 2 i K |m_i|^2 m_i + Omega
template <typename Scalar>
BasicFieldState<Scalar> eom_rhs(const BasicFieldState<Scalar>& s, const ModelRates& r) {
  using C = std::complex<Scalar>;
  if (!s.finite()) throw NumericError("eom_rhs: non-finite state");
  const C I(0, 1);
  const C loss_a(Scalar(r.kappa_a), Scalar(r.delta_a));
  const C loss_m(Scalar(r.kappa_m), Scalar(r.delta_m));
  const Scalar g(r.g), J(r.J), K(r.K), drive(r.drive);

  auto cavity = [&](const C& a, const C& m, const C& a_other) {
    return -loss_a * a - I * g * m + I * J * a_other;
  };
  auto magnon = [&](const C& m, const C& a) {
    return -loss_m * m - I * g * a - I * (Scalar(2) * K * std::norm(m)) * m + C(drive, 0);
  };
  return {cavity(s.a_L, s.m_L, s.a_R), magnon(s.m_L, s.a_L), cavity(s.a_R, s.m_R, s.a_L),
          magnon(s.m_R, s.a_R)};
}

/// eom_rhs expressed in quadrature coordinates.
template <typename Derived>
Quadratures<typename Derived::Scalar> eom_rhs(const Eigen::MatrixBase<Derived>& q,
                                              const ModelRates& r) {
  return to_quadratures(eom_rhs(from_quadratures(q), r));
}

/// d(rhs)/d(Omega) in quadrature coordinates: the drive enters only the magnon X rows.
template <typename Scalar = double>
Quadratures<Scalar> drive_direction() {
  Quadratures<Scalar> b = Quadratures<Scalar>::Zero();
  b(2) = b(6) = std::sqrt(Scalar(2));
  return b;
}

/// Linearized drift matrix A at `s`, in the fixed quadrature ordering.
///
/// Per resonator the 4x4 block reads
///
///   [ -ka     Da     0            g          ]
///   [ -Da    -ka    -g            0          ]
///   [  0      g     -km + DKy     D'' - DKx  ]
///   [ -g      0     -D'' - DKx   -km - DKy   ]
///
/// with D'' = Delta_m + 4 K |m|^2 and DKx + i DKy = 2 K m^2. Tunneling adds
/// [[0, -J], [J, 0]] between the two cavity quadrature pairs only.
template <typename Scalar>
Matrix8<Scalar> drift_matrix(const BasicFieldState<Scalar>& s, const ModelRates& r) {
  if (!s.finite()) throw NumericError("drift_matrix: non-finite state");
  const Scalar ka(r.kappa_a), km(r.kappa_m), da(r.delta_a), dm(r.delta_m), g(r.g), J(r.J),
      K(r.K);
  Matrix8<Scalar> A = Matrix8<Scalar>::Zero();
  for (int side = 0; side < 2; ++side) {
    const auto& m = side == 0 ? s.m_L : s.m_R;
    const Scalar d2 = dm + Scalar(4) * K * std::norm(m);
    const std::complex<Scalar> dk = Scalar(2) * K * m * m;
    const Scalar dkx = dk.real(), dky = dk.imag();
    auto B = A.template block<4, 4>(4 * side, 4 * side);
    B << -ka, da, 0, g,
         -da, -ka, -g, 0,
         0, g, -km + dky, d2 - dkx,
         -g, 0, -d2 - dkx, -km - dky;
  }
  A(0, 5) = -J;
  A(1, 4) = J;
  A(4, 1) = -J;
  A(5, 0) = J;
  return A;
}

/// D = diag(ka, ka, km, km, ka, ka, km, km) for vacuum input noise (vacuum variance 1/2).
inline Matrix8<double> diffusion_matrix(const ModelRates& r) {
  Quadratures<double> d;
  d << r.kappa_a, r.kappa_a, r.kappa_m, r.kappa_m, r.kappa_a, r.kappa_a, r.kappa_m, r.kappa_m;
  return d.asDiagonal();
}

/// Amplitude/phase form of eom_rhs. Requires every amplitude to be strictly
/// positive; the populations are n = |amplitude|^2 and dn/dt is the exact time
/// derivative of that product.
PolarRates amplitude_phase_rhs(const PolarState& p, const ModelRates& r);

}  // namespace magdimer
