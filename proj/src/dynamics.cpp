#include "magdimer/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "magdimer/model.hpp"
#include "magdimer/parallel.hpp"

namespace magdimer {
namespace {

namespace odeint = boost::numeric::odeint;
using OdeState = std::array<double, 8>;

OdeState to_ode(const FieldState& s) {
  const Quadratures<double> q = to_quadratures(s);
  OdeState x;
  for (int k = 0; k < 8; ++k) x[k] = q(k);
  return x;
}

FieldState from_ode(const OdeState& x) {
  return from_quadratures(Eigen::Map<const Quadratures<double>>(x.data()));
}

struct Rhs {
  ModelRates rates;
  void operator()(const OdeState& x, OdeState& dxdt, double /*t*/) const {
    const Quadratures<double> d = eom_rhs(Eigen::Map<const Quadratures<double>>(x.data()), rates);
    for (int k = 0; k < 8; ++k) dxdt[k] = d(k);
  }
};

using Stepper = odeint::dense_output_runge_kutta<
    odeint::controlled_runge_kutta<odeint::runge_kutta_dopri5<OdeState>>>;

// Dense-output driver that hands samples to a callback; the callback returns
// false to stop early.
template <typename OnSample>
void drive(const FieldState& initial, const ModelRates& rates, double abs_tol, double rel_tol,
           double t0, double dt_sample, std::size_t max_samples, OnSample&& on_sample) {
  Rhs rhs{rates};
  Stepper stepper = odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<OdeState>());
  stepper.initialize(to_ode(initial), t0, 1e-3 / rates.kappa_a);
  if (!on_sample(t0, initial)) return;
  OdeState x;
  for (std::size_t k = 1; k < max_samples; ++k) {
    const double t = t0 + k * dt_sample;
    try {
      while (stepper.current_time() < t) stepper.do_step(rhs);
    } catch (const odeint::step_adjustment_error& e) {
      throw StepUnderflowError(std::string("integrator step-size underflow: ") + e.what(),
                               stepper.current_time(), from_ode(stepper.current_state()));
    }
    stepper.calc_state(t, x);
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }))
      throw StepUnderflowError("integrator produced a non-finite state", stepper.previous_time(),
                               from_ode(stepper.previous_state()));
    if (!on_sample(t, from_ode(x))) return;
  }
}

double default_abs_tol(const ModelRates& r, const IntegrationOptions& opts) {
  return opts.abs_tol > 0 ? opts.abs_tol : opts.rel_tol * amplitude_scale(r);
}

}  // namespace

std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
  if (n < 2) throw DomainError("uniform_times needs at least two samples");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = t0 + (t1 - t0) * double(k) / double(n - 1);
  return out;
}

Trajectory integrate(const FieldState& initial, const SystemParams& params,
                     std::span<const double> sample_times, const IntegrationOptions& opts) {
  if (!initial.finite()) throw NumericError("integrate: non-finite initial state");
  if (!(opts.rel_tol > 0)) throw ParameterError("integrate: tolerance must be positive");
  if (sample_times.empty()) throw DomainError("integrate: no sample times");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
      std::adjacent_find(sample_times.begin(), sample_times.end()) != sample_times.end())
    throw DomainError("integrate: sample times must be strictly increasing");

  const ModelRates r = derive_rates(params);
  Trajectory traj;
  traj.segments.push_back({sample_times.front(), params});
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());

  Rhs rhs{r};
  Stepper stepper = odeint::make_dense_output(default_abs_tol(r, opts), opts.rel_tol,
                                              odeint::runge_kutta_dopri5<OdeState>());
  stepper.initialize(to_ode(initial), sample_times.front(), 1e-3 / r.kappa_a);
  traj.times.push_back(sample_times.front());
  traj.states.push_back(initial);
  OdeState x;
  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    const double t = sample_times[k];
    try {
      while (stepper.current_time() < t) stepper.do_step(rhs);
    } catch (const odeint::step_adjustment_error& e) {
      throw StepUnderflowError(std::string("integrator step-size underflow: ") + e.what(),
                               stepper.current_time(), from_ode(stepper.current_state()));
    }
    stepper.calc_state(t, x);
    FieldState s = from_ode(x);
    if (!s.finite())
      throw StepUnderflowError("integrator produced a non-finite state", traj.times.back(),
                               traj.states.back());
    traj.times.push_back(t);
    traj.states.push_back(s);
  }
  return traj;
}

double relaxation_time(const Trajectory& traj, const FieldState& target, double eps_rel) {
  if (traj.times.empty()) throw DomainError("relaxation_time: empty trajectory");
  const double t_quench = traj.segments.empty() ? traj.times.front() : traj.segments.back().t_start;
  const Quadratures<double> q_target = to_quadratures(target);
  const double radius = eps_rel * q_target.norm();
  auto inside = [&](std::size_t k) { return (to_quadratures(traj.states[k]) - q_target).norm() <= radius; };

  std::size_t first = std::lower_bound(traj.times.begin(), traj.times.end(), t_quench) - traj.times.begin();
  if (first == traj.times.size() || !inside(traj.times.size() - 1))
    throw DomainError("relaxation_time: target never entered");
  std::size_t k = traj.times.size() - 1;
  while (k > first && inside(k - 1)) --k;
  return traj.times[k] - t_quench;
}

QuenchOutcome simulate_quench(const QuenchProtocol& protocol, const SystemParams& base,
                              const IntegrationOptions& opts) {
  if (!(protocol.P_init > 0) || !(protocol.P_final > 0))
    throw ParameterError("quench powers must be positive");
  const SystemParams p_init = with_power(base, protocol.P_init);
  const SystemParams p_final = with_power(base, protocol.P_final);
  const ModelRates r_init = derive_rates(p_init);
  const ModelRates r_final = derive_rates(p_final);
  const double kappa = r_init.kappa_a;
  const double t_settle = protocol.t_settle > 0 ? protocol.t_settle : 200 / kappa;
  const double t_max = protocol.t_max > 0 ? protocol.t_max : 1e5 / kappa;
  const double dwell = protocol.dwell > 0 ? protocol.dwell : 10 / kappa;
  const double dt = protocol.sample_interval > 0 ? protocol.sample_interval : 0.02 / kappa;

  QuenchOutcome out;
  Trajectory& traj = out.trajectory;
  traj.segments.push_back({-t_settle, p_init});
  traj.segments.push_back({0.0, p_final});

  // Settling segment, t in [-t_settle, 0].
  const std::size_t n_settle = static_cast<std::size_t>(std::ceil(t_settle / dt)) + 1;
  const double dt_settle = t_settle / double(n_settle - 1);
  drive(protocol.initial.value_or(FieldState{}), r_init, default_abs_tol(r_init, opts), opts.rel_tol,
        -t_settle, dt_settle, n_settle, [&](double t, const FieldState& s) {
          traj.times.push_back(t);
          traj.states.push_back(s);
          return true;
        });
  traj.times.back() = 0.0;
  const FieldState settled = traj.states.back();
  const double residual = eom_rhs(to_quadratures(settled), r_init).norm();
  if (!(residual <= protocol.settle_residual * kappa * to_quadratures(settled).norm()))
    throw SolverError("pre-quench state did not settle; increase t_settle");

  std::vector<FixedPoint> targets;
  for (auto& fp : find_all_fixed_points(r_final))
    if (fp.stable()) targets.push_back(fp);
  if (targets.empty()) throw SolverError("no stable fixed point after the quench");
  std::vector<Quadratures<double>> q_targets;
  for (const auto& fp : targets) q_targets.push_back(to_quadratures(fp.state));

  int inside_idx = -1;
  double t_enter = 0;
  bool converged = false;
  const std::size_t max_samples = static_cast<std::size_t>(std::ceil(t_max / dt)) + 1;
  drive(settled, r_final, default_abs_tol(r_final, opts), opts.rel_tol, 0.0, dt, max_samples,
        [&](double t, const FieldState& s) {
          if (t > 0) {
            traj.times.push_back(t);
            traj.states.push_back(s);
          }
          const Quadratures<double> q = to_quadratures(s);
          int now = -1;
          for (std::size_t k = 0; k < q_targets.size(); ++k)
            if ((q - q_targets[k]).norm() <= protocol.eps_rel * q_targets[k].norm()) now = int(k);
          if (now != inside_idx) {
            inside_idx = now;
            t_enter = t;
          }
          if (inside_idx >= 0 && t - t_enter >= dwell) {
            converged = true;
            return false;
          }
          return true;
        });

  RelaxationResult& rel = out.relaxation;
  rel.converged = converged;
  if (converged) {
    rel.final_fp = targets[inside_idx];
    rel.tau = relaxation_time(traj, rel.final_fp.state, protocol.eps_rel);
  } else {
    // Report the closest stable state and the horizon as a lower bound.
    const Quadratures<double> q = to_quadratures(traj.states.back());
    std::size_t best = 0;
    for (std::size_t k = 1; k < q_targets.size(); ++k)
      if ((q - q_targets[k]).norm() < (q - q_targets[best]).norm()) best = k;
    rel.final_fp = targets[best];
    rel.tau = t_max;
  }
  return out;
}

PowerLawFit csd_exponent_fit(std::span<const std::pair<double, double>> delta_tau) {
  if (delta_tau.size() < 5) throw DomainError("csd_exponent_fit: need at least 5 points; widen the scan");
  double dmin = delta_tau.front().first, dmax = dmin;
  for (auto [d, tau] : delta_tau) {
    if (!(d > 0) || !(tau > 0)) throw DomainError("csd_exponent_fit: delta and tau must be positive");
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmax < 10 * dmin) throw DomainError("csd_exponent_fit: data span less than one decade; widen the scan");

  const double n = double(delta_tau.size());
  double sx = 0, sy = 0;
  for (auto [d, tau] : delta_tau) {
    sx += std::log(d);
    sy += std::log(tau);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [d, tau] : delta_tau) {
    const double x = std::log(d) - mx, y = std::log(tau) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double sse = 0;
  for (auto [d, tau] : delta_tau) {
    const double e = std::log(tau) - (fit.intercept + fit.exponent * std::log(d));
    sse += e * e;
  }
  fit.standard_error = std::sqrt(sse / (n - 2) / sxx);
  fit.r_squared = syy > 0 ? 1 - sse / syy : 1.0;
  return fit;
}

std::vector<QuenchScanRow> quench_scan(const SystemParams& base, double P_init, double P_c,
                                       std::span<const double> relative_offsets, int side,
                                       const QuenchProtocol& tmpl, const IntegrationOptions& opts) {
  std::vector<QuenchScanRow> rows(relative_offsets.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    QuenchProtocol q = tmpl;
    q.P_init = P_init;
    q.P_final = P_c * (1 + (side >= 0 ? 1 : -1) * relative_offsets[i]);
    const QuenchOutcome o = simulate_quench(q, base, opts);
    rows[i] = {q.P_final, std::abs(q.P_final - P_c), o.relaxation.tau, o.relaxation.converged,
               o.relaxation.final_fp.branch_class};
  });
  return rows;
}

}  // namespace magdimer
