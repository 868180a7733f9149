#include "magdimer/fluctuations.hpp"

#include "magdimer/model.hpp"

namespace magdimer {

FluctuationReport analyze_fluctuations(const FieldState& fixed_point, const ModelRates& r) {
  FluctuationReport rep;
  const Matrix8<double> A = drift_matrix(fixed_point, r);
  const Matrix8<double> D = diffusion_matrix(r);
  rep.covariance = solve_lyapunov(A, D);
  rep.lyapunov_residual = lyapunov_residual(A, rep.covariance, D);
  rep.magnons = reduce_to_magnons(rep.covariance);
  rep.fidelity = gaussian_fidelity(rep.magnons.alpha, rep.magnons.gamma);
  rep.infidelity = 1 - rep.fidelity;
  rep.mutual_information = mutual_information(rep.magnons);
  rep.log_negativity = logarithmic_negativity(rep.magnons);
  const auto nu = symplectic_eigenvalues(rep.magnons);
  rep.nu_plus = nu.nu_plus;
  rep.nu_minus = nu.nu_minus;
  return rep;
}

double cross_infidelity(const FluctuationReport& left_from, const FluctuationReport& right_from) {
  return 1 - gaussian_fidelity(left_from.magnons.alpha, right_from.magnons.gamma);
}

}  // namespace magdimer
