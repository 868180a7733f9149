#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "magdimer/params.hpp"
#include "magdimer/steady_state.hpp"

namespace magdimer {

/// Step control for pseudo-arclength continuation. Arclength is measured in
/// scaled coordinates: amplitudes over amplitude_scale(), power over the
/// starting power.
struct StepControl {
  double initial_step = 1e-2;
  double min_step = 1e-9;
  double max_step = 4e-2;
  int max_points = 20000;
  int direction = +1;             // sign of dP_d at the start
  int max_corrector_iterations = 15;
};

struct BranchSample {
  double P_d = 0;
  FixedPoint fp;
  double tangent_P = 0;           // dP/ds along the branch (scaled)
  bool fold = false;              // refined saddle-node inserted by detect_saddle_node
};

struct FoldPoint {
  double P_d = 0;
  FixedPoint fp;
  bool corroborated = false;      // a real drift eigenvalue crosses zero here
};

struct BranchCurve {
  SystemParams params;            // P_d is overridden per sample
  BranchClass branch_class = BranchClass::Other;
  std::vector<BranchSample> samples;
  std::vector<FoldPoint> fold_points;
  std::vector<FoldPoint> anomalies;  // tangent turns without eigenvalue corroboration
  bool truncated = false;
  std::string truncation_reason;
  bool closed = false;            // the branch returned to its start (isola / loop)
  std::size_t start_index = 0;    // sample holding the starting fixed point
  double amplitude_scale = 1;     // continuation coordinates: q / amplitude_scale
  double power_scale = 1;         //                           P_d / power_scale
};

/// Pseudo-arclength continuation in P_d from `start` (a fixed point at
/// params.P_d) within [P_min, P_max]. Rounds folds and records them.
BranchCurve continue_branch(const FixedPoint& start, const SystemParams& params, double P_min,
                            double P_max, const StepControl& step = {});

/// Both directions from `start`, joined into one curve ordered by arclength.
BranchCurve trace_branch(const FixedPoint& start, const SystemParams& params, double P_min,
                         double P_max, StepControl step = {});

/// Sign changes of dP/ds, refined by bisection along the arclength and
/// checked against the drift spectrum.
std::vector<FoldPoint> detect_saddle_node(const BranchCurve& curve);

struct HopfCrossing {
  double parameter = 0;
  std::size_t index = 0;          // crossing lies between index and index + 1
  double frequency = 0;           // |Im| of the crossing pair
};

/// Parameter values where a complex-conjugate pair of eigenvalues crosses
/// Re = 0 with |Im| > im_tol. Works on any sequence of spectra.
std::vector<HopfCrossing> detect_hopf_crossings(std::span<const double> parameters,
                                                std::span<const Eigen::VectorXcd> spectra,
                                                double im_tol);

std::vector<HopfCrossing> detect_hopf(const BranchCurve& curve);

/// Powers of the nearest corroborated folds before and after the start
/// sample: the window over which the branch segment through the start exists.
struct FoldWindow {
  double lower = 0;
  double upper = 0;
};
std::optional<FoldWindow> fold_window(const BranchCurve& curve);

enum class Region { Mono1S, Bi2S, Multi2S2AS, None0S, Other };

std::string_view to_string(Region r);

/// 1S: one stable, symmetric. 2S: two stable, both symmetric. 2S-2AS: four
/// stable with exactly two asymmetric. 0S: no stable fixed point.
Region classify_region(int n_stable, int n_asym_stable);

struct PhasePoint {
  double P_d = 0;                 // W
  double J = 0;                   // multiple of kappa_a
  int n_stable = 0;
  int n_asym_stable = 0;
  int n_fixed_points = 0;
  int n_symmetric_roots = 0;      // roots of the symmetric-subspace cubic
  Region region = Region::Other;
  bool hopf_flag = false;
  double max_abs_Z = 0;           // over stable asymmetric states
  bool valid = true;
};

/// True when some fixed point is unstable only through complex-conjugate pairs.
bool hopf_unstable(const FixedPoint& fp, const ModelRates& r);

PhasePoint evaluate_phase_point(const SystemParams& params, const MultistartOptions& opts = {});

struct PhaseDiagram {
  std::vector<double> P_grid;
  std::vector<double> J_grid;
  std::vector<PhasePoint> cells;  // J-major: cells[j * P_grid.size() + p]

  const PhasePoint& at(std::size_t j, std::size_t p) const { return cells[j * P_grid.size() + p]; }
};

PhaseDiagram sweep_phase_diagram(const SystemParams& base, std::vector<double> P_grid,
                                 std::vector<double> J_grid, const MultistartOptions& opts = {});

/// Bisection for the power where `inside` flips between P_lo and P_hi.
double refine_boundary(const std::function<bool(double)>& inside, double P_lo, double P_hi,
                       double rel_tol = 1e-6);

}  // namespace magdimer
