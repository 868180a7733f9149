#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "magdimer/errors.hpp"
#include "magdimer/field_state.hpp"
#include "magdimer/params.hpp"
#include "magdimer/steady_state.hpp"

namespace magdimer {

struct IntegrationOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0;  // 0: rel_tol times the amplitude scale of the parameters
};

/// Sampled solution of the semiclassical equations. Times are in seconds;
/// each segment records the parameters in force from its start time on.
struct Trajectory {
  struct Segment {
    double t_start = 0;
    SystemParams params;
  };
  std::vector<double> times;
  std::vector<FieldState> states;
  std::vector<Segment> segments;
};

/// The integrator could not make progress; carries the last good state.
class StepUnderflowError : public SolverError {
 public:
  StepUnderflowError(const std::string& what, double t, const FieldState& s)
      : SolverError(what), last_time(t), last_state(s) {}
  double last_time;
  FieldState last_state;
};

/// n evenly spaced times covering [t0, t1] inclusive.
std::vector<double> uniform_times(double t0, double t1, std::size_t n);

/// Adaptive Dormand-Prince 5(4) integration of eom_rhs with dense output at
/// `sample_times` (ascending, first entry is the initial time).
Trajectory integrate(const FieldState& initial, const SystemParams& params,
                     std::span<const double> sample_times, const IntegrationOptions& opts = {});

struct QuenchProtocol {
  double P_init = 0;                    // W
  double P_final = 0;                   // W
  double t_settle = 0;                  // s; 0 means 200 / kappa_a
  double t_max = 0;                     // s after the quench; 0 means 1e5 / kappa_a
  double eps_rel = 1e-4;                // relaxation ball radius relative to |target|
  double dwell = 0;                     // s inside the ball to declare relaxation; 0 means 10 / kappa_a
  double sample_interval = 0;           // s; 0 means 0.02 / kappa_a
  double settle_residual = 1e-6;        // |rhs| / (kappa_a |state|) required at the quench
  std::optional<FieldState> initial;    // pre-quench initial condition; vacuum if empty
};

struct RelaxationResult {
  double tau = 0;                       // s from the quench instant (lower bound if !converged)
  FixedPoint final_fp;
  bool converged = false;
};

struct QuenchOutcome {
  Trajectory trajectory;                // quench instant at t = 0, settling at t < 0
  RelaxationResult relaxation;
};

/// Settle at P_init, switch the drive to P_final, integrate until the state
/// stays within eps_rel of a stable fixed point (found independently at
/// P_final) for the dwell window.
QuenchOutcome simulate_quench(const QuenchProtocol& protocol, const SystemParams& base,
                              const IntegrationOptions& opts = {});

/// First time after the quench from which the trajectory never leaves the
/// eps_rel ball around `target`. DomainError if the final sample is outside.
double relaxation_time(const Trajectory& traj, const FieldState& target, double eps_rel);

struct PowerLawFit {
  double exponent = 0;
  double standard_error = 0;
  double intercept = 0;                 // ln C in tau = C delta^exponent
  double r_squared = 0;
};

/// Least squares of ln(tau) against ln(delta). Needs >= 5 points spanning
/// at least one decade in delta.
PowerLawFit csd_exponent_fit(std::span<const std::pair<double, double>> delta_tau);

struct QuenchScanRow {
  double P_final = 0;
  double delta = 0;                     // |P_final - P_c|
  double tau = 0;
  bool converged = false;
  BranchClass final_class = BranchClass::Other;
};

/// Quenches from P_init to P_c (1 + side * offset) for each relative offset.
std::vector<QuenchScanRow> quench_scan(const SystemParams& base, double P_init, double P_c,
                                       std::span<const double> relative_offsets, int side,
                                       const QuenchProtocol& tmpl = {},
                                       const IntegrationOptions& opts = {});

}  // namespace magdimer
