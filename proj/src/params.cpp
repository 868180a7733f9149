#include "magdimer/params.hpp"

#include <cmath>
#include <string>

#include "magdimer/errors.hpp"
#include "magdimer/field_state.hpp"
#include "magdimer/model.hpp"

namespace magdimer {

SystemParams reference_params() { return SystemParams{}; }

void validate(const SystemParams& p) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ParameterError(std::string("invalid parameter: ") + what);
  };
  for (double v : {p.nu_a, p.nu_m, p.nu_d, p.kappa_a, p.kappa_m, p.g, p.J, p.K, p.P_d})
    check(std::isfinite(v), "non-finite value");
  check(p.kappa_a > 0, "kappa_a must be positive");
  check(p.kappa_m > 0, "kappa_m must be positive");
  check(p.g >= 0, "g must be nonnegative");
  check(p.J >= 0, "J must be nonnegative");
  check(p.P_d >= 0, "P_d must be nonnegative");
  check(p.nu_d > 0, "drive frequency must be positive");
}

double drive_amplitude(const SystemParams& p) {
  if (!(p.nu_d > 0)) throw ParameterError("drive frequency must be positive");
  if (p.P_d < 0) throw ParameterError("P_d must be nonnegative");
  return std::sqrt(2.0 * kTwoPi * p.kappa_m * p.P_d / (kHbar * kTwoPi * p.nu_d));
}

double drive_power_for_amplitude(const SystemParams& p, double omega) {
  return omega * omega * kHbar * kTwoPi * p.nu_d / (2.0 * kTwoPi * p.kappa_m);
}

ModelRates derive_rates(const SystemParams& p) {
  validate(p);
  ModelRates r;
  r.delta_a = kTwoPi * (p.nu_a - p.nu_d);
  r.delta_m = kTwoPi * (p.nu_m - p.nu_d);
  r.kappa_a = kTwoPi * p.kappa_a;
  r.kappa_m = kTwoPi * p.kappa_m;
  r.g = kTwoPi * p.g;
  r.J = p.J * r.kappa_a;
  r.K = kTwoPi * p.K;
  r.omega_d = kTwoPi * p.nu_d;
  r.drive = drive_amplitude(p);
  return r;
}

SystemParams with_power(SystemParams p, double P_d) {
  p.P_d = P_d;
  return p;
}

SystemParams with_tunneling(SystemParams p, double J_over_kappa_a) {
  p.J = J_over_kappa_a;
  return p;
}

PolarRates amplitude_phase_rhs(const PolarState& p, const ModelRates& r) {
  if (!(p.n_aL > 0 && p.n_mL > 0 && p.n_aR > 0 && p.n_mR > 0))
    throw DomainError("amplitude_phase_rhs: zero amplitude, use the Cartesian form");

  struct Side {
    double n_a, n_m, psi, phi, n_a_other, psi_other;
  };
  auto one = [&](const Side& s, double& dn_a, double& dn_m, double& dpsi, double& dphi) {
    const double x = s.psi - s.phi;
    const double dpsi_other = s.psi_other - s.psi;
    const double nam = std::sqrt(s.n_a * s.n_m);
    const double naa = std::sqrt(s.n_a * s.n_a_other);
    dn_a = 2.0 * (-r.kappa_a * s.n_a - r.g * nam * std::sin(x) - r.J * naa * std::sin(dpsi_other));
    dn_m = 2.0 * (-r.kappa_m * s.n_m + r.g * nam * std::sin(x) +
                  r.drive * std::sqrt(s.n_m) * std::cos(s.phi));
    const double delta_m_eff = r.delta_m + 2.0 * r.K * s.n_m;
    dpsi = -r.delta_a - r.g * std::sqrt(s.n_m / s.n_a) * std::cos(x) +
           r.J * std::sqrt(s.n_a_other / s.n_a) * std::cos(dpsi_other);
    dphi = -delta_m_eff - r.g * std::sqrt(s.n_a / s.n_m) * std::cos(x) -
           r.drive / std::sqrt(s.n_m) * std::sin(s.phi);
  };

  PolarRates out;
  one({p.n_aL, p.n_mL, p.psi_L, p.phi_L, p.n_aR, p.psi_R}, out.dn_aL, out.dn_mL, out.dpsi_L,
      out.dphi_L);
  one({p.n_aR, p.n_mR, p.psi_R, p.phi_R, p.n_aL, p.psi_L}, out.dn_aR, out.dn_mR, out.dpsi_R,
      out.dphi_R);
  return out;
}

}  // namespace magdimer
