#include "magdimer/bifurcation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "magdimer/errors.hpp"
#include "magdimer/model.hpp"
#include "magdimer/parallel.hpp"

namespace magdimer {
namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

constexpr double kResidualTol = 1e-11;

// Continuation coordinates y = (q / S, P_d / P_ref); G(y) = rhs / (kappa_a S).
class ExtendedSystem {
 public:
  ExtendedSystem(const SystemParams& base, double S, double P_ref)
      : base_(base), S_(S), P_ref_(P_ref), kappa_(derive_rates(base).kappa_a) {}

  double S() const { return S_; }
  double P_ref() const { return P_ref_; }

  ModelRates rates(double p) const { return derive_rates(with_power(base_, p * P_ref_)); }

  Vec9 lift(const FieldState& s, double P) const {
    Vec9 y;
    y.head<8>() = to_quadratures(s) / S_;
    y(8) = P / P_ref_;
    return y;
  }
  FieldState state(const Vec9& y) const { return from_quadratures(Quadratures<double>(y.head<8>() * S_)); }
  double power(const Vec9& y) const { return y(8) * P_ref_; }

  Quadratures<double> G(const Vec9& y) const {
    return eom_rhs(Quadratures<double>(y.head<8>() * S_), rates(y(8))) / (kappa_ * S_);
  }

  // Rows 0-7: dG/dy; row 8: the supplied bordering vector.
  Mat9 bordered(const Vec9& y, const Vec9& border) const {
    const ModelRates r = rates(y(8));
    Mat9 M;
    M.topLeftCorner<8, 8>() = drift_matrix(state(y), r) / kappa_;
    // dOmega/dp = Omega / (2 p) since Omega ~ sqrt(P).
    M.block<8, 1>(0, 8) = drive_direction() * (r.drive / (2 * y(8))) / (kappa_ * S_);
    M.row(8) = border.transpose();
    return M;
  }

  // Unit tangent of the solution curve, oriented along `orient`.
  std::optional<Vec9> tangent(const Vec9& y, const Vec9& orient) const {
    Vec9 rhs = Vec9::Zero();
    rhs(8) = 1;
    Vec9 t = Eigen::PartialPivLU<Mat9>(bordered(y, orient)).solve(rhs);
    if (!t.allFinite() || t.norm() == 0) return std::nullopt;
    t.normalize();
    if (t.dot(orient) < 0) t = -t;
    return t;
  }

  struct Corrected {
    Vec9 y;
    int iterations = 0;
  };

  // Newton on G(y) = 0, d . (y - anchor) = s.
  std::optional<Corrected> correct(const Vec9& anchor, const Vec9& d, double s, int max_it) const {
    Vec9 y = anchor + s * d;
    for (int it = 1; it <= max_it; ++it) {
      if (!(y(8) > 0)) return std::nullopt;
      Vec9 r;
      r.head<8>() = G(y);
      r(8) = d.dot(y - anchor) - s;
      if (!r.allFinite()) return std::nullopt;
      const Vec9 dy = Eigen::PartialPivLU<Mat9>(bordered(y, d)).solve(-r);
      if (!dy.allFinite()) return std::nullopt;
      y += dy;
      if (dy.norm() < 1e-12 * (1 + y.norm())) {
        if (G(y).norm() < kResidualTol) return Corrected{y, it};
      }
    }
    if (G(y).norm() < kResidualTol) return Corrected{y, max_it};
    return std::nullopt;
  }

 private:
  SystemParams base_;
  double S_;
  double P_ref_;
  double kappa_;
};

ExtendedSystem system_for(const BranchCurve& curve) {
  return ExtendedSystem(curve.params, curve.amplitude_scale, curve.power_scale);
}

BranchSample make_sample(const FieldState& s, double P, const SystemParams& params,
                         double tangent_P) {
  const ModelRates r = derive_rates(with_power(params, P));
  BranchSample out;
  out.P_d = P;
  out.fp = make_fixed_point(s, r);
  const auto siblings = symmetric_steady_states(r);
  out.fp.branch_class = classify(out.fp, siblings, r, &out.fp.ambiguous);
  out.tangent_P = tangent_P;
  return out;
}

bool corroborates_fold(const FixedPoint& fp, const ModelRates& r) {
  const double tol = 1e-3 * r.kappa_a;
  for (int k = 0; k < 8; ++k) {
    const auto ev = fp.eigenvalues(k);
    if (std::abs(ev.imag()) <= tol && std::abs(ev.real()) <= tol) return true;
  }
  return false;
}

void insert_folds(BranchCurve& curve) {
  curve.fold_points.clear();
  curve.anomalies.clear();
  std::vector<BranchSample> merged;
  std::size_t start = curve.start_index;
  const auto folds = detect_saddle_node(curve);
  std::size_t next = 0;
  // detect_saddle_node reports folds in curve order together with their bracket.
  for (std::size_t k = 0; k < curve.samples.size(); ++k) {
    merged.push_back(curve.samples[k]);
    if (k + 1 < curve.samples.size() &&
        std::signbit(curve.samples[k].tangent_P) != std::signbit(curve.samples[k + 1].tangent_P) &&
        next < folds.size()) {
      const FoldPoint& f = folds[next++];
      if (f.corroborated) {
        BranchSample fs;
        fs.P_d = f.P_d;
        fs.fp = f.fp;
        fs.tangent_P = 0;
        fs.fold = true;
        merged.push_back(fs);
        if (k < curve.start_index) ++start;
        curve.fold_points.push_back(f);
      } else {
        curve.anomalies.push_back(f);
      }
    }
  }
  curve.samples = std::move(merged);
  curve.start_index = start;
}

}  // namespace

BranchCurve continue_branch(const FixedPoint& start, const SystemParams& params, double P_min,
                            double P_max, const StepControl& step) {
  if (!(params.P_d > 0)) throw ParameterError("continuation needs a positive starting power");
  if (!(P_min < P_max) || params.P_d < P_min || params.P_d > P_max)
    throw ParameterError("continuation range must bracket the starting power");

  BranchCurve curve;
  curve.params = params;
  curve.amplitude_scale = amplitude_scale(derive_rates(params));
  curve.power_scale = params.P_d;
  const ExtendedSystem sys = system_for(curve);

  Vec9 e_p = Vec9::Zero();
  e_p(8) = step.direction >= 0 ? 1 : -1;
  Vec9 y = sys.lift(start.state, params.P_d);
  auto t0 = sys.tangent(y, e_p);
  if (!t0) throw SolverError("continuation: singular start (start exactly at a fold?)");
  // Resolve the start accurately on the curve before stepping.
  if (auto c = sys.correct(y, *t0, 0.0, step.max_corrector_iterations)) y = c->y;

  curve.samples.push_back(make_sample(sys.state(y), sys.power(y), params, (*t0)(8)));
  curve.branch_class = curve.samples.front().fp.branch_class;

  const Vec9 y_start = y;
  double travelled = 0;
  Vec9 d = *t0;
  Vec9 t_prev = *t0;
  double h = step.initial_step;
  const double p_lo = P_min / sys.P_ref(), p_hi = P_max / sys.P_ref();

  while (static_cast<int>(curve.samples.size()) < step.max_points) {
    auto c = sys.correct(y, d, h, step.max_corrector_iterations);
    std::optional<Vec9> t_new;
    bool ok = c && (c->y - y).norm() <= 3 * h;
    if (ok) {
      t_new = sys.tangent(c->y, d);
      ok = t_new && t_new->dot(t_prev) > 0.9;
    }
    if (!ok) {
      h /= 2;
      if (h < step.min_step) {
        curve.truncated = true;
        curve.truncation_reason = "corrector diverged at minimum step";
        break;
      }
      continue;
    }
    const Vec9 y_new = c->y;
    if (y_new(8) < p_lo || y_new(8) > p_hi) break;
    travelled += (y_new - y).norm();
    if (travelled > 10 * step.max_step && (y_new - y_start).norm() < 2 * h &&
        (y_new - y_start).dot(d) >= 0) {
      curve.closed = true;
      break;
    }
    curve.samples.push_back(make_sample(sys.state(y_new), sys.power(y_new), params, (*t_new)(8)));
    d = (y_new - y).normalized();
    y = y_new;
    t_prev = *t_new;
    if (c->iterations <= 3) h = std::min(h * 1.5, step.max_step);
    else if (c->iterations > 6) h *= 0.6;
  }
  insert_folds(curve);
  return curve;
}

BranchCurve trace_branch(const FixedPoint& start, const SystemParams& params, double P_min,
                         double P_max, StepControl step) {
  step.direction = +1;
  BranchCurve fwd = continue_branch(start, params, P_min, P_max, step);
  if (fwd.closed) return fwd;
  step.direction = -1;
  BranchCurve back = continue_branch(start, params, P_min, P_max, step);

  BranchCurve curve;
  curve.params = params;
  curve.branch_class = fwd.branch_class;
  curve.amplitude_scale = fwd.amplitude_scale;
  curve.power_scale = fwd.power_scale;
  curve.truncated = back.truncated || fwd.truncated;
  curve.truncation_reason = back.truncated ? back.truncation_reason : fwd.truncation_reason;
  for (auto it = back.samples.rbegin(); it != back.samples.rend(); ++it) {
    if (it->fold) continue;
    BranchSample s = *it;
    s.tangent_P = -s.tangent_P;
    curve.samples.push_back(s);
  }
  curve.start_index = curve.samples.size() - 1;
  for (std::size_t k = 1; k < fwd.samples.size(); ++k)
    if (!fwd.samples[k].fold) curve.samples.push_back(fwd.samples[k]);
  insert_folds(curve);
  return curve;
}

std::vector<FoldPoint> detect_saddle_node(const BranchCurve& curve) {
  std::vector<FoldPoint> out;
  if (curve.samples.size() < 3) return out;
  const ExtendedSystem sys = system_for(curve);
  for (std::size_t k = 0; k + 1 < curve.samples.size(); ++k) {
    const auto& a = curve.samples[k];
    const auto& b = curve.samples[k + 1];
    if (a.fold || b.fold) continue;
    if (std::signbit(a.tangent_P) == std::signbit(b.tangent_P)) continue;

    const Vec9 ya = sys.lift(a.fp.state, a.P_d);
    const Vec9 yb = sys.lift(b.fp.state, b.P_d);
    const Vec9 d = (yb - ya).normalized();
    const double span = (yb - ya).norm();
    const bool sign_lo = std::signbit(a.tangent_P);
    double lo = 0, hi = span;
    Vec9 y_lo = ya, y_hi = yb;
    double tp_lo = a.tangent_P, tp_hi = b.tangent_P;
    bool failed = false;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * span; ++it) {
      const double mid = (lo + hi) / 2;
      auto c = sys.correct(ya, d, mid, 30);
      if (!c) {
        failed = true;
        break;
      }
      auto t = sys.tangent(c->y, d);
      if (!t) {  // exactly singular: we are on the fold
        y_lo = y_hi = c->y;
        tp_lo = tp_hi = 0;
        break;
      }
      if (std::signbit((*t)(8)) == sign_lo) {
        lo = mid;
        y_lo = c->y;
        tp_lo = (*t)(8);
      } else {
        hi = mid;
        y_hi = c->y;
        tp_hi = (*t)(8);
      }
    }
    const Vec9& y_star = std::abs(tp_lo) <= std::abs(tp_hi) ? y_lo : y_hi;
    FoldPoint f;
    f.P_d = sys.power(y_star);
    const ModelRates r = sys.rates(y_star(8));
    f.fp = make_fixed_point(sys.state(y_star), r);
    f.fp.branch_class = classify(f.fp, symmetric_steady_states(r), r, &f.fp.ambiguous);
    f.corroborated = !failed && corroborates_fold(f.fp, r);
    out.push_back(f);
  }
  return out;
}

std::vector<HopfCrossing> detect_hopf_crossings(std::span<const double> parameters,
                                                std::span<const Eigen::VectorXcd> spectra,
                                                double im_tol) {
  if (parameters.size() != spectra.size())
    throw DomainError("detect_hopf_crossings: size mismatch");
  // Largest real part among oscillatory eigenvalues, or nullopt if none.
  auto lead = [&](const Eigen::VectorXcd& ev) -> std::optional<std::pair<double, double>> {
    std::optional<std::pair<double, double>> best;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      if (std::abs(ev(k).imag()) <= im_tol) continue;
      if (!best || ev(k).real() > best->first) best = std::pair{ev(k).real(), std::abs(ev(k).imag())};
    }
    return best;
  };
  std::vector<HopfCrossing> out;
  for (std::size_t k = 0; k + 1 < spectra.size(); ++k) {
    const auto a = lead(spectra[k]), b = lead(spectra[k + 1]);
    if (!a || !b) continue;
    if ((a->first < 0) == (b->first < 0)) continue;
    const double w = a->first / (a->first - b->first);
    out.push_back({parameters[k] + w * (parameters[k + 1] - parameters[k]), k,
                   a->second + w * (b->second - a->second)});
  }
  return out;
}

std::vector<HopfCrossing> detect_hopf(const BranchCurve& curve) {
  std::vector<double> params;
  std::vector<Eigen::VectorXcd> spectra;
  for (const auto& s : curve.samples) {
    if (s.fold) continue;
    params.push_back(s.P_d);
    spectra.emplace_back(s.fp.eigenvalues);
  }
  return detect_hopf_crossings(params, spectra, 1e-3 * derive_rates(curve.params).kappa_a);
}

std::optional<FoldWindow> fold_window(const BranchCurve& curve) {
  const std::size_t n = curve.samples.size();
  // On a closed branch the search wraps around the loop.
  const std::size_t reach = curve.closed ? n : 0;
  std::optional<double> before, after;
  for (std::size_t step = 1; step < n; ++step) {
    if (step > curve.start_index && !curve.closed) break;
    const auto& s = curve.samples[(curve.start_index + n - step) % n];
    if (s.fold) {
      before = s.P_d;
      break;
    }
  }
  for (std::size_t step = 1; step < n; ++step) {
    const std::size_t k = curve.start_index + step;
    if (k >= n + reach || (k >= n && !curve.closed)) break;
    const auto& s = curve.samples[k % n];
    if (s.fold) {
      after = s.P_d;
      break;
    }
  }
  if (!before || !after) return std::nullopt;
  return FoldWindow{std::min(*before, *after), std::max(*before, *after)};
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Mono1S: return "1S";
    case Region::Bi2S: return "2S";
    case Region::Multi2S2AS: return "2S-2AS";
    case Region::None0S: return "0S";
    case Region::Other: return "other";
  }
  return "?";
}

Region classify_region(int n_stable, int n_asym_stable) {
  if (n_stable == 0) return Region::None0S;
  if (n_stable == 1 && n_asym_stable == 0) return Region::Mono1S;
  if (n_stable == 2 && n_asym_stable == 0) return Region::Bi2S;
  if (n_stable == 4 && n_asym_stable == 2) return Region::Multi2S2AS;
  return Region::Other;
}

bool hopf_unstable(const FixedPoint& fp, const ModelRates& r) {
  const double eps = stability_threshold(r);
  const double im_tol = 1e-3 * r.kappa_a;
  bool any = false;
  for (int k = 0; k < 8; ++k) {
    const auto ev = fp.eigenvalues(k);
    if (ev.real() <= eps) continue;
    if (std::abs(ev.imag()) <= im_tol) return false;
    any = true;
  }
  return any;
}

PhasePoint evaluate_phase_point(const SystemParams& params, const MultistartOptions& opts) {
  PhasePoint pt;
  pt.P_d = params.P_d;
  pt.J = params.J;
  try {
    const ModelRates r = derive_rates(params);
    const auto fps = find_all_fixed_points(r, opts);
    pt.n_fixed_points = static_cast<int>(fps.size());
    pt.n_symmetric_roots = static_cast<int>(symmetric_occupations(r).size());
    for (const auto& fp : fps) {
      if (hopf_unstable(fp, r)) pt.hopf_flag = true;
      if (!fp.stable()) continue;
      ++pt.n_stable;
      if (is_asymmetric(fp.branch_class)) {
        ++pt.n_asym_stable;
        pt.max_abs_Z = std::max(pt.max_abs_Z, std::abs(fp.imbalance_Z));
      }
    }
    pt.region = classify_region(pt.n_stable, pt.n_asym_stable);
  } catch (const std::exception&) {
    pt.valid = false;
    pt.region = Region::Other;
  }
  return pt;
}

PhaseDiagram sweep_phase_diagram(const SystemParams& base, std::vector<double> P_grid,
                                 std::vector<double> J_grid, const MultistartOptions& opts) {
  if (P_grid.empty() || J_grid.empty()) throw ParameterError("phase diagram grids must be nonempty");
  if (!std::is_sorted(P_grid.begin(), P_grid.end()) || !std::is_sorted(J_grid.begin(), J_grid.end()))
    throw ParameterError("phase diagram grids must be sorted");
  PhaseDiagram pd;
  pd.P_grid = std::move(P_grid);
  pd.J_grid = std::move(J_grid);
  const std::size_t nP = pd.P_grid.size();
  pd.cells.resize(nP * pd.J_grid.size());
  parallel_for(pd.cells.size(), [&](std::size_t i) {
    const SystemParams p = with_power(with_tunneling(base, pd.J_grid[i / nP]), pd.P_grid[i % nP]);
    pd.cells[i] = evaluate_phase_point(p, opts);
  });
  return pd;
}

double refine_boundary(const std::function<bool(double)>& inside, double P_lo, double P_hi,
                       double rel_tol) {
  const bool at_lo = inside(P_lo);
  if (at_lo == inside(P_hi)) throw DomainError("refine_boundary: no flip inside the bracket");
  while (P_hi - P_lo > rel_tol * std::max(std::abs(P_lo), std::abs(P_hi))) {
    const double mid = (P_lo + P_hi) / 2;
    (inside(mid) == at_lo ? P_lo : P_hi) = mid;
  }
  return (P_lo + P_hi) / 2;
}

}  // namespace magdimer
