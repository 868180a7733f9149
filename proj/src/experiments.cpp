#include "magdimer/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <fmt/format.h>

#include "magdimer/parallel.hpp"

namespace magdimer {
namespace {

CsvTable make_table(std::string kind, const ExperimentConfig& c) {
  CsvTable t;
  t.kind = std::move(kind);
  t.tool_version = std::string(kToolVersion);
  t.config_hash = config_hash(c);
  t.columns = schema(t.kind);
  return t;
}

std::string num(double v) { return format_number(v); }
std::string mW(double P) { return format_number(P * 1e3); }

double scaled_distance(const BranchCurve& curve, const BranchSample& s, const FieldState& x, double P) {
  const double dq = (to_quadratures(s.fp.state) - to_quadratures(x)).norm() / curve.amplitude_scale;
  const double dp = (s.P_d - P) / curve.power_scale;
  return std::hypot(dq, dp);
}

StepControl step_from(const SolverSection& s) {
  StepControl step;
  step.max_step = s.continuation_max_step;
  step.initial_step = std::min(step.initial_step, step.max_step);
  return step;
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw DomainError("linspace: need at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = lo + (hi - lo) * double(k) / double(n - 1);
  out.back() = hi;
  return out;
}

std::vector<BranchCurve> trace_all_branches(const SystemParams& params, double P_min, double P_max,
                                            const MultistartOptions& opts, const StepControl& step) {
  const std::vector<FixedPoint> fps = find_all_fixed_points(derive_rates(params), opts);
  std::vector<BranchCurve> traced(fps.size());
  parallel_for(fps.size(), [&](std::size_t i) { traced[i] = trace_branch(fps[i], params, P_min, P_max, step); });

  std::vector<BranchCurve> kept;
  for (std::size_t i = 0; i < fps.size(); ++i) {
    bool seen = false;
    for (const BranchCurve& c : kept)
      for (const BranchSample& s : c.samples)
        if (scaled_distance(c, s, fps[i].state, params.P_d) < 0.05) {
          seen = true;
          break;
        }
    if (!seen) kept.push_back(std::move(traced[i]));
  }
  return kept;
}

SymmetricFolds symmetric_folds(const SystemParams& params, double P_min, double P_max) {
  for (const FixedPoint& fp : symmetric_steady_states(derive_rates(params))) {
    const BranchCurve curve = trace_branch(fp, params, P_min, P_max);
    std::vector<double> folds;
    for (const FoldPoint& f : curve.fold_points)
      if (f.corroborated) folds.push_back(f.P_d);
    std::sort(folds.begin(), folds.end());
    if (folds.size() == 2) return {folds[0], folds[1]};
    throw SolverError(fmt::format("symmetric branch has {} folds in [{}, {}] mW, expected 2", folds.size(),
                                  P_min * 1e3, P_max * 1e3));
  }
  throw SolverError("no symmetric steady state");
}

std::vector<double> quench_offsets(const QuenchSection& q) {
  std::vector<double> out;
  const double a = std::log10(q.offset_max), b = std::log10(q.offset_min);
  for (double e : linspace(a, b, q.offset_count)) out.push_back(std::pow(10.0, e));
  return out;
}

QuenchProtocol make_protocol(const QuenchSection& q, double kappa_a) {
  QuenchProtocol p;
  p.eps_rel = q.eps_rel;
  p.t_settle = q.t_settle_kappa / kappa_a;
  p.t_max = q.t_max_kappa / kappa_a;
  p.dwell = q.dwell_kappa / kappa_a;
  p.sample_interval = q.sample_kappa / kappa_a;
  return p;
}

std::vector<std::vector<std::string>> fluct_rows(const SystemParams& params, const MultistartOptions& opts) {
  const ModelRates r = derive_rates(params);
  std::vector<FixedPoint> stable;
  for (auto& fp : find_all_fixed_points(r, opts))
    if (fp.stable()) stable.push_back(fp);
  std::vector<FluctuationReport> reports;
  for (const auto& fp : stable) reports.push_back(analyze_fluctuations(fp.state, r));

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < stable.size(); ++i) {
    const auto& f = reports[i];
    const std::string cls(to_string(stable[i].branch_class));
    rows.push_back({mW(params.P_d), cls + "|" + cls, "within", num(f.fidelity), num(f.infidelity),
                    num(f.mutual_information), num(f.log_negativity), num(f.nu_plus), num(f.nu_minus),
                    num(f.lyapunov_residual)});
  }
  for (std::size_t i = 0; i < stable.size(); ++i)
    for (std::size_t j = 0; j < stable.size(); ++j) {
      if (i == j) continue;
      const double inf = cross_infidelity(reports[i], reports[j]);
      rows.push_back({mW(params.P_d),
                      std::string(to_string(stable[i].branch_class)) + "|" +
                          std::string(to_string(stable[j].branch_class)),
                      "cross", num(1 - inf), num(inf), "", "", "", "", ""});
    }
  return rows;
}

std::vector<Artifact> run_steady(const ExperimentConfig& c) {
  const SystemParams p = to_params(c.system);
  CsvTable t = make_table("steady", c);
  int index = 0;
  for (const FixedPoint& fp : find_all_fixed_points(derive_rates(p), to_multistart(c.solver))) {
    const FieldState& s = fp.state;
    const char* stability = fp.stability == Stability::Stable     ? "stable"
                            : fp.stability == Stability::Unstable ? "unstable"
                                                                  : "marginal";
    t.rows.push_back({std::to_string(index++), std::string(to_string(fp.branch_class)), stability,
                      num(s.n_aL()), num(s.n_mL()), num(s.n_aR()), num(s.n_mR()), num(fp.imbalance_Z),
                      num(fp.max_re_eigenvalue()), num(s.a_L.real()), num(s.a_L.imag()), num(s.m_L.real()),
                      num(s.m_L.imag()), num(s.a_R.real()), num(s.a_R.imag()), num(s.m_R.real()),
                      num(s.m_R.imag())});
  }
  return {{"steady.csv", std::move(t)}};
}

std::vector<Artifact> run_branch(const ExperimentConfig& c) {
  const SystemParams p = to_params(c.system);
  const auto curves = trace_all_branches(p, c.sweep.P_min_mW / 1e3, c.sweep.P_max_mW / 1e3,
                                         to_multistart(c.solver), step_from(c.solver));
  CsvTable t = make_table("branch", c);
  for (std::size_t b = 0; b < curves.size(); ++b)
    for (const BranchSample& s : curves[b].samples) {
      const FieldState& x = s.fp.state;
      t.rows.push_back({std::to_string(b), mW(s.P_d), num(x.n_mL()), num(x.n_mR()), num(x.n_aL()),
                        num(x.n_aR()), num(s.fp.imbalance_Z), num(s.fp.max_re_eigenvalue()),
                        std::string(to_string(s.fp.branch_class)), s.fold ? "1" : "0"});
    }
  return {{"branch.csv", std::move(t)}};
}

std::vector<Artifact> run_phase_diagram(const ExperimentConfig& c) {
  const SystemParams p = to_params(c.system);
  const PhaseDiagram d = sweep_phase_diagram(
      p, linspace(c.sweep.P_min_mW / 1e3, c.sweep.P_max_mW / 1e3, c.sweep.P_count),
      linspace(c.sweep.J_min, c.sweep.J_max, c.sweep.J_count), to_multistart(c.solver));
  CsvTable t = make_table("phase", c);
  for (const PhasePoint& pt : d.cells)
    t.rows.push_back({mW(pt.P_d), num(pt.J), std::string(to_string(pt.region)), std::to_string(pt.n_stable),
                      num(pt.max_abs_Z), pt.hopf_flag ? "1" : "0"});
  return {{"phase.csv", std::move(t)}};
}

std::vector<Artifact> run_quench(const ExperimentConfig& c) {
  const SystemParams p = to_params(c.system);
  const MultistartOptions ms = to_multistart(c.solver);
  const SymmetricFolds folds = symmetric_folds(p, c.sweep.P_min_mW / 1e3, c.sweep.P_max_mW / 1e3);
  const bool lower = c.quench.fold == FoldChoice::Lower;
  const double P_c = lower ? folds.lower : folds.upper;
  const int side = lower ? -1 : +1;
  const double P_init = lower ? P_c * c.quench.P_init_ratio : P_c / c.quench.P_init_ratio;

  const ModelRates r_init = derive_rates(with_power(p, P_init));
  QuenchProtocol proto = make_protocol(c.quench, r_init.kappa_a);
  const BranchClass start_class = lower ? BranchClass::SymHigh : BranchClass::SymLow;
  for (const FixedPoint& fp : find_all_fixed_points(r_init, ms))
    if (fp.branch_class == start_class && fp.stable()) proto.initial = fp.state;
  if (!proto.initial)
    throw SolverError(fmt::format("no stable {} state at the pre-quench power {} mW", to_string(start_class),
                                  P_init * 1e3));

  const IntegrationOptions io = to_integration(c.solver);
  const std::vector<double> offsets = quench_offsets(c.quench);
  CsvTable scan = make_table("quench_scan", c);
  for (const QuenchScanRow& row : quench_scan(p, P_init, P_c, offsets, side, proto, io))
    scan.rows.push_back({mW(row.P_final), mW(row.delta), num(row.tau), row.converged ? "1" : "0",
                         std::string(to_string(row.final_class))});

  proto.P_init = P_init;
  proto.P_final = P_c * (1 + side * c.quench.trajectory_offset);
  const QuenchOutcome o = simulate_quench(proto, p, io);
  CsvTable traj = make_table("trajectory", c);
  const double t_from = -c.quench.dwell_kappa / r_init.kappa_a;
  for (std::size_t k = 0; k < o.trajectory.times.size(); ++k) {
    if (o.trajectory.times[k] < t_from) continue;
    const FieldState& s = o.trajectory.states[k];
    traj.rows.push_back({num(o.trajectory.times[k]), num(s.a_L.real()), num(s.a_L.imag()), num(s.m_L.real()),
                         num(s.m_L.imag()), num(s.a_R.real()), num(s.a_R.imag()), num(s.m_R.real()),
                         num(s.m_R.imag()), num(s.n_mL()), num(s.n_mR())});
  }
  return {{"quench_scan.csv", std::move(scan)}, {"trajectory.csv", std::move(traj)}};
}

std::vector<Artifact> run_fluct(const ExperimentConfig& c) {
  const SystemParams p = to_params(c.system);
  const MultistartOptions ms = to_multistart(c.solver);
  const std::vector<double> P = linspace(c.sweep.P_min_mW / 1e3, c.sweep.P_max_mW / 1e3, c.sweep.P_count);
  std::vector<std::vector<std::vector<std::string>>> per_power(P.size());
  parallel_for(P.size(), [&](std::size_t i) { per_power[i] = fluct_rows(with_power(p, P[i]), ms); });
  CsvTable t = make_table("fluct", c);
  for (auto& rows : per_power)
    for (auto& row : rows) t.rows.push_back(std::move(row));
  return {{"fluct.csv", std::move(t)}};
}

std::vector<Artifact> run_subcommand(std::string_view name, const ExperimentConfig& c) {
  if (name == "steady") return run_steady(c);
  if (name == "branch") return run_branch(c);
  if (name == "phase-diagram") return run_phase_diagram(c);
  if (name == "quench") return run_quench(c);
  if (name == "fluct") return run_fluct(c);
  throw ParameterError(fmt::format("unknown subcommand '{}'", name));
}

std::vector<std::string> write_artifacts(const std::vector<Artifact>& artifacts, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
  std::vector<std::string> paths;
  for (const Artifact& a : artifacts) {
    const std::string path = (std::filesystem::path(dir) / a.file_name).string();
    write_file(path, render_csv(a.table));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace magdimer
