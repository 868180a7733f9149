#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "magdimer/bifurcation.hpp"
#include "magdimer/dynamics.hpp"
#include "magdimer/errors.hpp"
#include "magdimer/params.hpp"
#include "magdimer/steady_state.hpp"

namespace magdimer {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Malformed or inconsistent configuration. `line` is 0 when unknown.
class ConfigError : public ParameterError {
 public:
  ConfigError(const std::string& what, std::string key, int line)
      : ParameterError(what), key(std::move(key)), line(line) {}
  std::string key;
  int line;
};

/// System parameters in the units of the config file. The detuning is given
/// either as a drive frequency (with nu_m) or as the pair of detunings.
struct SystemSection {
  double nu_a_GHz = 10;
  std::optional<double> nu_m_GHz;
  std::optional<double> nu_d_GHz;
  std::optional<double> delta_a_MHz = -11;
  std::optional<double> delta_m_MHz = -11;
  double kappa_a_MHz = 1;
  double kappa_m_MHz = 1;
  double g_MHz = 7;
  double K_nHz = 9;
  double J_over_kappa_a = 0.8;
  double P_d_mW = 30;

  bool operator==(const SystemSection&) const = default;
};

struct SweepSection {
  double P_min_mW = 1;
  double P_max_mW = 100;
  int P_count = 101;
  double J_min = 0.2;
  double J_max = 3.0;
  int J_count = 41;

  bool operator==(const SweepSection&) const = default;
};

struct SolverSection {
  std::uint64_t seed = 20240531;
  int lattice = 9;
  int phase_offsets = 4;
  double dedup_tol = 1e-6;
  double newton_rel_tol = 1e-10;
  int newton_max_iter = 200;
  double ode_rel_tol = 1e-9;
  double continuation_max_step = 4e-2;

  bool operator==(const SolverSection&) const = default;
};

enum class FoldChoice { Lower, Upper };

struct QuenchSection {
  FoldChoice fold = FoldChoice::Lower;  // lower: high branch ends; upper: low branch ends
  double P_init_ratio = 1.2;            // P_init / P_c
  double offset_min = 1e-4;             // relative quench offsets past P_c
  double offset_max = 1e-1;
  int offset_count = 10;
  double eps_rel = 1e-4;
  double t_settle_kappa = 200;          // times in units of 1 / kappa_a
  double t_max_kappa = 1e5;
  double dwell_kappa = 10;
  double sample_kappa = 0.02;
  double trajectory_offset = 1e-3;      // offset of the quench written as a trajectory

  bool operator==(const QuenchSection&) const = default;
};

struct OutputSection {
  std::string dir = "out";

  bool operator==(const OutputSection&) const = default;
};

struct ExperimentConfig {
  SystemSection system;
  SweepSection sweep;
  SolverSection solver;
  QuenchSection quench;
  OutputSection output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// INI text: `[section]` headers, `key = value` lines, `#` or `;` comment
/// lines. Unknown sections or keys, duplicates, and bad numbers are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& c);

/// Enforces the cross-key invariants (detuning specification, positivity,
/// grid ordering). Called by parse_config.
void validate(const ExperimentConfig& c);

/// Unit conversion from config units to SI.
SystemParams to_params(const SystemSection& s);
MultistartOptions to_multistart(const SolverSection& s);
IntegrationOptions to_integration(const SolverSection& s);

/// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace magdimer
