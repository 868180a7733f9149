#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "magdimer/bifurcation.hpp"
#include "magdimer/config.hpp"
#include "magdimer/csv.hpp"
#include "magdimer/dynamics.hpp"
#include "magdimer/fluctuations.hpp"

namespace magdimer {

struct Artifact {
  std::string file_name;
  CsvTable table;
};

/// Distinct solution curves through the fixed points at params.P_d. Curves
/// that revisit an already traced fixed point are dropped.
std::vector<BranchCurve> trace_all_branches(const SystemParams& params, double P_min, double P_max,
                                            const MultistartOptions& opts = {},
                                            const StepControl& step = {});

struct SymmetricFolds {
  double lower = 0;  // high branch ends
  double upper = 0;  // low branch ends
};

/// Saddle-node powers of the symmetric S-curve by continuation.
SymmetricFolds symmetric_folds(const SystemParams& params, double P_min, double P_max);

/// Relative offsets log-spaced from offset_max down to offset_min.
std::vector<double> quench_offsets(const QuenchSection& q);

QuenchProtocol make_protocol(const QuenchSection& q, double kappa_a);

/// Within-state and cross-state fluctuation rows at one power.
std::vector<std::vector<std::string>> fluct_rows(const SystemParams& params,
                                                 const MultistartOptions& opts);

std::vector<double> linspace(double lo, double hi, int n);

std::vector<Artifact> run_steady(const ExperimentConfig& c);
std::vector<Artifact> run_branch(const ExperimentConfig& c);
std::vector<Artifact> run_phase_diagram(const ExperimentConfig& c);
std::vector<Artifact> run_quench(const ExperimentConfig& c);
std::vector<Artifact> run_fluct(const ExperimentConfig& c);

/// Dispatch on steady | branch | phase-diagram | quench | fluct.
std::vector<Artifact> run_subcommand(std::string_view name, const ExperimentConfig& c);

/// Writes each artifact under `dir` (created if needed); returns the paths.
std::vector<std::string> write_artifacts(const std::vector<Artifact>& artifacts, const std::string& dir);

}  // namespace magdimer
