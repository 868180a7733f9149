#include "magdimer/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "magdimer/cubic.hpp"
#include "magdimer/errors.hpp"
#include "magdimer/model.hpp"
#include "magdimer/parallel.hpp"

namespace magdimer {

using Complex = std::complex<double>;

SymmetricEffectiveParams symmetric_effective_params(const ModelRates& r) {
  SymmetricEffectiveParams e;
  const double d = r.delta_a - r.J;
  e.eta = r.g * r.g / (r.kappa_a * r.kappa_a + d * d);
  e.Delta0 = r.delta_m - e.eta * d;
  e.kappa0 = r.kappa_m + e.eta * r.kappa_a;
  return e;
}

AsymmetricEffectiveParams asymmetric_effective_params(const FieldState& s, const ModelRates& r) {
  if (std::abs(s.a_L) == 0 || std::abs(s.a_R) == 0)
    throw DomainError("asymmetric_effective_params: zero photon amplitude");
  AsymmetricEffectiveParams e;
  e.dpsi = std::arg(s.a_R) - std::arg(s.a_L);
  e.f = std::abs(s.a_R) / std::abs(s.a_L);
  const double c = std::cos(e.dpsi), sn = std::sin(e.dpsi);
  e.Delta_tilde = {r.delta_a - r.J * e.f * c, r.delta_a - r.J * c / e.f};
  e.kappa = {r.kappa_a + r.J * e.f * sn, r.kappa_a - r.J * sn / e.f};
  for (int i = 0; i < 2; ++i) {
    e.eta[i] = r.g * r.g / (e.kappa[i] * e.kappa[i] + e.Delta_tilde[i] * e.Delta_tilde[i]);
    e.Delta_tilde_m[i] = r.delta_m - e.eta[i] * e.Delta_tilde[i];
    e.kappa_tilde_m[i] = r.kappa_m + e.eta[i] * e.kappa[i];
  }
  return e;
}

std::array<std::array<double, 4>, 2> asymmetric_cubic_coefficients(const FieldState& s,
                                                                   const ModelRates& r) {
  const auto e = asymmetric_effective_params(s, r);
  std::array<std::array<double, 4>, 2> out;
  for (int i = 0; i < 2; ++i) {
    const double dm = e.Delta_tilde_m[i], km = e.kappa_tilde_m[i];
    out[i] = {4 * r.K * r.K, 4 * r.K * dm, dm * dm + km * km, -r.drive * r.drive};
  }
  return out;
}

BistabilityCriterion bistability_criterion(const ModelRates& r) {
  const auto e = symmetric_effective_params(r);
  BistabilityCriterion c;
  c.margin = e.Delta0 * e.Delta0 - 3 * e.kappa0 * e.kappa0;
  c.positive = c.margin > 0;
  c.bistable = c.positive && r.K * e.Delta0 < 0;
  return c;
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

std::string_view to_string(BranchClass c) {
  switch (c) {
    case BranchClass::SymLow: return "sym_low";
    case BranchClass::SymMid: return "sym_mid";
    case BranchClass::SymHigh: return "sym_high";
    case BranchClass::AsymLowHigh: return "asym_low_high";
    case BranchClass::AsymHighLow: return "asym_high_low";
    case BranchClass::Other: return "other";
  }
  return "?";
}

bool is_symmetric(BranchClass c) {
  return c == BranchClass::SymLow || c == BranchClass::SymMid || c == BranchClass::SymHigh;
}

bool is_asymmetric(BranchClass c) {
  return c == BranchClass::AsymLowHigh || c == BranchClass::AsymHighLow;
}

double FixedPoint::max_re_eigenvalue() const { return eigenvalues.real().maxCoeff(); }

double population_imbalance(const FieldState& s) {
  const double total = s.n_mL() + s.n_mR();
  if (!(total > 0)) throw DomainError("population_imbalance: both magnon occupations are zero");
  return (s.n_mL() - s.n_mR()) / total;
}

double stability_threshold(const ModelRates& r) { return 1e-6 * r.kappa_a; }

FixedPoint make_fixed_point(const FieldState& s, const ModelRates& r) {
  FixedPoint fp;
  fp.state = s;
  Eigen::EigenSolver<Matrix8<double>> es(drift_matrix(s, r), false);
  if (es.info() != Eigen::Success) throw NumericError("drift matrix eigen-decomposition failed");
  fp.eigenvalues = es.eigenvalues();
  const double max_re = fp.max_re_eigenvalue();
  const double eps = stability_threshold(r);
  fp.stability = max_re < -eps  ? Stability::Stable
                 : max_re > eps ? Stability::Unstable
                                : Stability::Marginal;
  const double total = s.n_mL() + s.n_mR();
  fp.imbalance_Z = total > 0 ? population_imbalance(s) : 0.0;
  return fp;
}

FieldState symmetric_state(double n_m, const ModelRates& r) {
  const auto e = symmetric_effective_params(r);
  const Complex m = r.drive / Complex(e.kappa0, e.Delta0 + 2 * r.K * n_m);
  const Complex a = Complex(0, -r.g) * m / Complex(r.kappa_a, r.delta_a - r.J);
  return {a, m, a, m};
}

std::vector<double> symmetric_occupations(const ModelRates& r) {
  const auto e = symmetric_effective_params(r);
  if (r.drive == 0) return {0.0};
  return solve_cubic_positive_roots(4 * r.K * r.K, 4 * e.Delta0 * r.K,
                                    e.Delta0 * e.Delta0 + e.kappa0 * e.kappa0,
                                    -r.drive * r.drive, /*allow_degenerate=*/true);
}

namespace {

constexpr double kSymTol = 1e-6;

bool looks_symmetric(const FieldState& s) {
  const double total = s.n_mL() + s.n_mR();
  if (total == 0) return std::abs(s.a_L - s.a_R) == 0;
  const double z = std::abs(s.n_mL() - s.n_mR()) / total;
  const double am = std::abs(s.a_L) + std::abs(s.a_R);
  const double mm = std::abs(s.m_L) + std::abs(s.m_R);
  return z < kSymTol && std::abs(s.a_L - s.a_R) <= kSymTol * am &&
         std::abs(s.m_L - s.m_R) <= kSymTol * mm;
}

}  // namespace

BranchClass classify(const FixedPoint& fp, std::span<const FixedPoint> siblings,
                     const ModelRates& r, bool* ambiguous) {
  auto flag = [&](bool v) {
    if (ambiguous) *ambiguous = v;
  };
  flag(false);
  const FieldState& s = fp.state;
  const double total = s.n_mL() + s.n_mR();
  if (total == 0) return BranchClass::SymLow;

  const double z = population_imbalance(s);
  if (std::abs(z) >= kSymTol) return z > 0 ? BranchClass::AsymHighLow : BranchClass::AsymLowHigh;
  if (!looks_symmetric(s)) {
    flag(true);
    return BranchClass::Other;
  }

  std::vector<double> occ{s.n_mL()};
  for (const auto& other : siblings)
    if (looks_symmetric(other.state)) occ.push_back(other.state.n_mL());
  std::sort(occ.begin(), occ.end());
  std::vector<double> distinct;
  for (double n : occ)
    if (distinct.empty() || std::abs(n - distinct.back()) > kSymTol * std::max(n, distinct.back()))
      distinct.push_back(n);

  const double n = s.n_mL();
  if (distinct.size() == 1) {
    const auto e = symmetric_effective_params(r);
    const double inflection = r.K != 0 ? -e.Delta0 / (3 * r.K) : 0.0;
    return inflection > 0 && n > inflection ? BranchClass::SymHigh : BranchClass::SymLow;
  }
  if (distinct.size() == 3) {
    const double median = distinct[1];
    if (std::abs(n - median) <= kSymTol * median) return BranchClass::SymMid;
    return n < median ? BranchClass::SymLow : BranchClass::SymHigh;
  }
  flag(true);
  return BranchClass::Other;
}

std::vector<FixedPoint> symmetric_steady_states(const ModelRates& r) {
  std::vector<FixedPoint> out;
  for (double n : symmetric_occupations(r)) out.push_back(make_fixed_point(symmetric_state(n, r), r));
  for (auto& fp : out) fp.branch_class = classify(fp, out, r, &fp.ambiguous);
  return out;
}

double amplitude_scale(const ModelRates& r) {
  const auto occ = symmetric_occupations(r);
  const double n = occ.empty() ? 0.0 : occ.back();
  return std::sqrt(2.0 * std::max(n, 1.0));
}

std::optional<FieldState> newton_fixed_point(const FieldState& seed, const ModelRates& r,
                                             const NewtonOptions& opts) {
  if (!seed.finite()) return std::nullopt;
  const double tol = std::max(opts.rel_tol * r.drive, opts.abs_floor);
  Quadratures<double> x = to_quadratures(seed);
  Quadratures<double> F = eom_rhs(x, r);
  double norm = F.norm();

  auto step_once = [&](double& norm_out) -> bool {
    Eigen::PartialPivLU<Matrix8<double>> lu(drift_matrix(from_quadratures(x), r));
    const Quadratures<double> dx = lu.solve(-F);
    if (!dx.allFinite()) return false;
    double lambda = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h, lambda *= 0.5) {
      const Quadratures<double> trial = x + lambda * dx;
      const Quadratures<double> Ft = eom_rhs(trial, r);
      const double nt = Ft.norm();
      if (std::isfinite(nt) && nt < norm) {
        x = trial;
        F = Ft;
        norm_out = nt;
        return true;
      }
    }
    return false;
  };

  bool converged = norm < tol;
  for (int it = 0; it < opts.max_iterations && !converged; ++it) {
    if (!step_once(norm)) return std::nullopt;
    converged = norm < tol;
  }
  if (!converged) return std::nullopt;
  // Polish toward machine precision; a failed polish keeps the converged point.
  for (int p = 0; p < 3 && norm > 0; ++p)
    if (!step_once(norm)) break;
  return from_quadratures(x);
}

std::vector<FieldState> default_seeds(const ModelRates& r, const MultistartOptions& opts) {
  std::vector<FieldState> seeds;
  const auto occ = symmetric_occupations(r);
  const auto e = symmetric_effective_params(r);
  for (double n : occ) {
    const FieldState s = symmetric_state(n, r);
    seeds.push_back(s);
    for (double eps : {0.05, 0.3, -0.05, -0.3}) {
      FieldState p = s;
      p.m_L *= 1 + eps;
      p.m_R *= 1 - eps;
      seeds.push_back(p);
    }
  }

  const double n_max = opts.n_max_factor * (occ.empty() ? 1.0 : std::max(occ.back(), 1.0));
  const Complex loss(r.kappa_a, r.delta_a);
  const Complex I(0, 1);
  // Photon fields that zero the (linear) cavity equations for given magnons.
  auto photons = [&](const Complex& mL, const Complex& mR) {
    const Complex det = loss * loss + r.J * r.J;  // det [[loss, -iJ], [-iJ, loss]]
    const Complex bL = -I * r.g * mL, bR = -I * r.g * mR;
    return std::pair{(loss * bL + I * r.J * bR) / det, (loss * bR + I * r.J * bL) / det};
  };
  auto natural_phase = [&](double n) {
    return std::arg(Complex(1, 0) / Complex(e.kappa0, e.Delta0 + 2 * r.K * n));
  };

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto jitter = [&](Complex z) { return z * Complex(1 + opts.jitter * unif(rng), opts.jitter * unif(rng)); };

  const int L = std::max(opts.occupation_lattice, 2);
  for (int o = 0; o < opts.phase_offsets; ++o) {
    const double offset = 2 * std::numbers::pi * o / opts.phase_offsets;
    for (int kl = 0; kl < L; ++kl) {
      for (int kr = 0; kr < L; ++kr) {
        const double nL = n_max * kl / (L - 1), nR = n_max * kr / (L - 1);
        const Complex mL = std::polar(std::sqrt(nL), natural_phase(nL) + offset);
        const Complex mR = std::polar(std::sqrt(nR), natural_phase(nR) + offset);
        auto [aL, aR] = photons(mL, mR);
        seeds.push_back({jitter(aL), jitter(mL), jitter(aR), jitter(mR)});
      }
    }
  }
  return seeds;
}

std::vector<FixedPoint> find_all_fixed_points(const ModelRates& r, const MultistartOptions& opts,
                                              std::span<const FieldState> extra_seeds) {
  if (r.drive == 0) {
    FixedPoint fp = make_fixed_point(FieldState{}, r);
    fp.branch_class = BranchClass::SymLow;
    return {fp};
  }

  std::vector<FieldState> seeds = default_seeds(r, opts);
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());

  std::vector<std::optional<FieldState>> solved(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { solved[i] = newton_fixed_point(seeds[i], r, opts.newton); });

  const double scale = amplitude_scale(r);
  const double tol = opts.dedup_tol * scale;
  std::vector<Quadratures<double>> found;
  auto add_unique = [&](const FieldState& s) {
    const Quadratures<double> q = to_quadratures(s);
    for (const auto& f : found)
      if ((f - q).norm() <= tol) return false;
    found.push_back(q);
    return true;
  };
  for (const auto& s : solved)
    if (s) add_unique(*s);

  // Parity closure: polish each mirror image and add it if it is new.
  const std::size_t n_direct = found.size();
  for (std::size_t i = 0; i < n_direct; ++i) {
    const FieldState mirror = parity(from_quadratures(found[i]));
    if (auto polished = newton_fixed_point(mirror, r, opts.newton)) add_unique(*polished);
  }
  if (found.empty()) throw SolverError("find_all_fixed_points: no fixed point found");

  std::vector<FixedPoint> out;
  out.reserve(found.size());
  for (const auto& q : found) out.push_back(make_fixed_point(from_quadratures(q), r));
  for (auto& fp : out) fp.branch_class = classify(fp, out, r, &fp.ambiguous);
  std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) {
    const double ta = a.state.n_mL() + a.state.n_mR(), tb = b.state.n_mL() + b.state.n_mR();
    if (ta != tb) return ta < tb;
    return a.imbalance_Z < b.imbalance_Z;
  });
  return out;
}

}  // namespace magdimer
