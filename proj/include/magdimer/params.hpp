#pragma once

#include <numbers>

namespace magdimer {

inline constexpr double kHbar = 1.054571817e-34;  // J s, CODATA 2018
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Physical constants and drive settings of the dimer.
///
/// Frequencies are ordinary (omega / 2 pi) values in Hz, the way they are
/// quoted experimentally. The tunneling rate is stored as a multiple of the
/// cavity loss rate. All model code works with the angular rates in
/// ModelRates instead.
struct SystemParams {
  double nu_a = 10.0e9;      // cavity frequency, Hz
  double nu_m = 10.0e9;      // magnon frequency, Hz
  double nu_d = 10.011e9;    // drive frequency, Hz
  double kappa_a = 1.0e6;    // cavity loss, Hz
  double kappa_m = 1.0e6;    // magnon loss, Hz
  double g = 7.0e6;          // photon-magnon coupling, Hz
  double J = 0.8;            // photon tunneling, multiple of kappa_a
  double K = 9.0e-9;         // magnon Kerr coefficient, Hz
  double P_d = 30.0e-3;      // drive power, W

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// The reference dimer: 10 GHz cavity and magnon, -11 MHz detunings, 1 MHz
/// losses, g = 7 MHz, K = 9 nHz, J = 0.8 kappa_a, 30 mW drive.
SystemParams reference_params();

/// Throws ParameterError unless the invariants on SystemParams hold.
void validate(const SystemParams& p);

/// Angular rates (rad/s) derived once per parameter set.
struct ModelRates {
  double delta_a = 0;   // omega_a - omega_d
  double delta_m = 0;   // omega_m - omega_d
  double kappa_a = 0;
  double kappa_m = 0;
  double g = 0;
  double J = 0;         // absolute tunneling rate
  double K = 0;
  double omega_d = 0;
  double drive = 0;     // Omega = sqrt(2 kappa_m P_d / (hbar omega_d))
};

/// Omega = sqrt(2 kappa_m P_d / (hbar omega_d)) in s^-1, angular units throughout.
double drive_amplitude(const SystemParams& p);

/// Inverse of drive_amplitude with respect to the power.
double drive_power_for_amplitude(const SystemParams& p, double omega);

ModelRates derive_rates(const SystemParams& p);

/// Same parameters at another drive power.
SystemParams with_power(SystemParams p, double P_d);

/// Same parameters at another tunneling rate (multiple of kappa_a).
SystemParams with_tunneling(SystemParams p, double J_over_kappa_a);

}  // namespace magdimer
