#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "magdimer/field_state.hpp"
#include "magdimer/params.hpp"

namespace magdimer {

/// Single-resonator reduction on the symmetric subspace (a_L = a_R, m_L = m_R).
struct SymmetricEffectiveParams {
  double Delta0 = 0;  // Delta_m - eta (Delta_a - J), rad/s
  double kappa0 = 0;  // kappa_m + eta kappa_a, rad/s
  double eta = 0;     // g^2 / (kappa_a^2 + (Delta_a - J)^2)
};

SymmetricEffectiveParams symmetric_effective_params(const ModelRates& r);

/// Per-side effective parameters of the coupled cubics, evaluated
/// self-consistently from a state's photon amplitude ratio f = |a_R| / |a_L|
/// and phase difference dpsi = psi_R - psi_L.
struct AsymmetricEffectiveParams {
  double dpsi = 0;
  double f = 1;
  std::array<double, 2> Delta_tilde{};    // cavity: Delta_a - J f cos(dpsi), Delta_a - J cos(dpsi) / f
  std::array<double, 2> kappa{};          // cavity: kappa_a + J f sin(dpsi), kappa_a - J sin(dpsi) / f
  std::array<double, 2> eta{};            // g^2 / (kappa_i^2 + Delta_tilde_i^2)
  std::array<double, 2> Delta_tilde_m{};  // Delta_m - eta_i Delta_tilde_i
  std::array<double, 2> kappa_tilde_m{};  // kappa_m + eta_i kappa_i
};

AsymmetricEffectiveParams asymmetric_effective_params(const FieldState& s, const ModelRates& r);

/// Coefficients (c3, c2, c1, c0) of 4K^2 n^3 + 4K Dm n^2 + (Dm^2 + km^2) n - Omega^2 per side.
std::array<std::array<double, 4>, 2> asymmetric_cubic_coefficients(const FieldState& s,
                                                                   const ModelRates& r);

struct BistabilityCriterion {
  double margin = 0;      // Delta0^2 - 3 kappa0^2
  bool positive = false;  // margin > 0
  /// margin > 0 and K Delta0 < 0: the S-curve folds at positive occupation,
  /// so some drive window has three symmetric steady states.
  bool bistable = false;
};

BistabilityCriterion bistability_criterion(const ModelRates& r);

enum class Stability { Stable, Unstable, Marginal };

enum class BranchClass { SymLow, SymMid, SymHigh, AsymLowHigh, AsymHighLow, Other };

std::string_view to_string(Stability s);
std::string_view to_string(BranchClass c);
bool is_symmetric(BranchClass c);
bool is_asymmetric(BranchClass c);

struct FixedPoint {
  FieldState state;
  Eigen::Matrix<std::complex<double>, 8, 1> eigenvalues;
  Stability stability = Stability::Unstable;
  BranchClass branch_class = BranchClass::Other;
  double imbalance_Z = 0;
  bool ambiguous = false;  // classification fell back to Other

  double max_re_eigenvalue() const;
  bool stable() const { return stability == Stability::Stable; }
};

/// Signed Z = (n_mL - n_mR) / (n_mL + n_mR); DomainError when both are zero.
double population_imbalance(const FieldState& s);

/// Stability threshold eps_stab used everywhere: 1e-6 kappa_a.
double stability_threshold(const ModelRates& r);

/// Eigenvalues of the drift matrix and the resulting stability label.
FixedPoint make_fixed_point(const FieldState& s, const ModelRates& r);

/// Full symmetric state for a symmetric-subspace occupation n_m.
FieldState symmetric_state(double n_m, const ModelRates& r);

/// Roots of 4K^2 n^3 + 4 Delta0 K n^2 + (Delta0^2 + kappa0^2) n - Omega^2 = 0, ascending.
std::vector<double> symmetric_occupations(const ModelRates& r);

/// Symmetric steady states with stability from the full 8x8 drift matrix.
/// Classes are assigned among the returned siblings.
std::vector<FixedPoint> symmetric_steady_states(const ModelRates& r);

/// Low/high labels come from the median of the coexisting symmetric
/// occupations; with a single symmetric root the S-curve inflection
/// -Delta0 / (3K) separates low from high.
BranchClass classify(const FixedPoint& fp, std::span<const FixedPoint> siblings,
                     const ModelRates& r, bool* ambiguous = nullptr);

struct NewtonOptions {
  int max_iterations = 200;
  int max_halvings = 30;
  double rel_tol = 1e-10;  // residual < rel_tol * Omega
  double abs_floor = 1e-30;
};

/// Damped Newton on eom_rhs = 0 from `seed`; nullopt on non-convergence.
std::optional<FieldState> newton_fixed_point(const FieldState& seed, const ModelRates& r,
                                             const NewtonOptions& opts = {});

struct MultistartOptions {
  int occupation_lattice = 9;  // per side
  int phase_offsets = 4;
  double n_max_factor = 4.0;   // seed ceiling relative to the largest symmetric root
  double jitter = 1e-3;        // relative amplitude jitter on every seed
  std::uint64_t seed = 20240531;
  double dedup_tol = 1e-6;     // state distance relative to the amplitude scale
  NewtonOptions newton{};
};

/// Multistart seeds: occupation lattice x phase offsets, plus the symmetric
/// roots and asymmetric perturbations of them.
std::vector<FieldState> default_seeds(const ModelRates& r, const MultistartOptions& opts);

/// Every distinct fixed point reached from the seeds, closed under parity,
/// classified, sorted by total magnon occupation then Z.
std::vector<FixedPoint> find_all_fixed_points(const ModelRates& r,
                                              const MultistartOptions& opts = {},
                                              std::span<const FieldState> extra_seeds = {});

/// Amplitude scale sqrt(2 n) with n the largest symmetric occupation (>= 1).
double amplitude_scale(const ModelRates& r);

}  // namespace magdimer
