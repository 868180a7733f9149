#include "magdimer/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace magdimer {
namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Line of `key` inside `section`, 0 if absent.
int line_of(std::string_view text, std::string_view section, std::string_view key) {
  std::string_view current;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view l = trim(text.substr(pos, end - pos));
    ++line;
    if (!l.empty() && l.front() == '[' && l.back() == ']') {
      current = trim(l.substr(1, l.size() - 2));
      if (key.empty() && current == section) return line;
    } else if (current == section && !key.empty()) {
      const auto eq = l.find('=');
      if (eq != std::string_view::npos && trim(l.substr(0, eq)) == key) return line;
    }
    pos = end + 1;
  }
  return 0;
}

std::string format_double(double v) { return fmt::format("{}", v); }

double parse_double(const std::string& key, std::string_view v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(fmt::format("unparseable number '{}' for key '{}'", v, key), key, 0);
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, std::string_view v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(fmt::format("unparseable integer '{}' for key '{}'", v, key), key, 0);
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <typename Member>
Field real(std::string section, std::string key, Member m) {
  const std::string full = section + "." + key;
  return {section, key,
          [m, full](ExperimentConfig& c, std::string_view v) { m(c) = parse_double(full, v); },
          [m](const ExperimentConfig& c) -> std::optional<std::string> {
            return format_double(m(c));
          }};
}

template <typename Member>
Field optional_real(std::string section, std::string key, Member m) {
  const std::string full = section + "." + key;
  return {section, key,
          [m, full](ExperimentConfig& c, std::string_view v) { m(c) = parse_double(full, v); },
          [m](const ExperimentConfig& c) -> std::optional<std::string> {
            const auto& o = m(c);
            if (!o) return std::nullopt;
            return format_double(*o);
          }};
}

template <typename Int, typename Member>
Field integer(std::string section, std::string key, Member m) {
  const std::string full = section + "." + key;
  return {section, key,
          [m, full](ExperimentConfig& c, std::string_view v) { m(c) = parse_int<Int>(full, v); },
          [m](const ExperimentConfig& c) -> std::optional<std::string> {
            return fmt::format("{}", m(c));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(real("system", "nu_a_GHz", [](auto& c) -> auto& { return c.system.nu_a_GHz; }));
    f.push_back(optional_real("system", "nu_m_GHz", [](auto& c) -> auto& { return c.system.nu_m_GHz; }));
    f.push_back(optional_real("system", "nu_d_GHz", [](auto& c) -> auto& { return c.system.nu_d_GHz; }));
    f.push_back(optional_real("system", "delta_a_MHz", [](auto& c) -> auto& { return c.system.delta_a_MHz; }));
    f.push_back(optional_real("system", "delta_m_MHz", [](auto& c) -> auto& { return c.system.delta_m_MHz; }));
    f.push_back(real("system", "kappa_a_MHz", [](auto& c) -> auto& { return c.system.kappa_a_MHz; }));
    f.push_back(real("system", "kappa_m_MHz", [](auto& c) -> auto& { return c.system.kappa_m_MHz; }));
    f.push_back(real("system", "g_MHz", [](auto& c) -> auto& { return c.system.g_MHz; }));
    f.push_back(real("system", "K_nHz", [](auto& c) -> auto& { return c.system.K_nHz; }));
    f.push_back(real("system", "J_over_kappa_a", [](auto& c) -> auto& { return c.system.J_over_kappa_a; }));
    f.push_back(real("system", "P_d_mW", [](auto& c) -> auto& { return c.system.P_d_mW; }));

    f.push_back(real("sweep", "P_min_mW", [](auto& c) -> auto& { return c.sweep.P_min_mW; }));
    f.push_back(real("sweep", "P_max_mW", [](auto& c) -> auto& { return c.sweep.P_max_mW; }));
    f.push_back(integer<int>("sweep", "P_count", [](auto& c) -> auto& { return c.sweep.P_count; }));
    f.push_back(real("sweep", "J_min", [](auto& c) -> auto& { return c.sweep.J_min; }));
    f.push_back(real("sweep", "J_max", [](auto& c) -> auto& { return c.sweep.J_max; }));
    f.push_back(integer<int>("sweep", "J_count", [](auto& c) -> auto& { return c.sweep.J_count; }));

    f.push_back(integer<std::uint64_t>("solver", "seed", [](auto& c) -> auto& { return c.solver.seed; }));
    f.push_back(integer<int>("solver", "lattice", [](auto& c) -> auto& { return c.solver.lattice; }));
    f.push_back(integer<int>("solver", "phase_offsets", [](auto& c) -> auto& { return c.solver.phase_offsets; }));
    f.push_back(real("solver", "dedup_tol", [](auto& c) -> auto& { return c.solver.dedup_tol; }));
    f.push_back(real("solver", "newton_rel_tol", [](auto& c) -> auto& { return c.solver.newton_rel_tol; }));
    f.push_back(integer<int>("solver", "newton_max_iter", [](auto& c) -> auto& { return c.solver.newton_max_iter; }));
    f.push_back(real("solver", "ode_rel_tol", [](auto& c) -> auto& { return c.solver.ode_rel_tol; }));
    f.push_back(real("solver", "continuation_max_step",
                     [](auto& c) -> auto& { return c.solver.continuation_max_step; }));

    f.push_back({"quench", "fold",
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "lower") c.quench.fold = FoldChoice::Lower;
                   else if (v == "upper") c.quench.fold = FoldChoice::Upper;
                   else throw ConfigError(fmt::format("quench.fold must be 'lower' or 'upper', got '{}'", v),
                                          "quench.fold", 0);
                 },
                 [](const ExperimentConfig& c) -> std::optional<std::string> {
                   return c.quench.fold == FoldChoice::Lower ? "lower" : "upper";
                 }});
    f.push_back(real("quench", "P_init_ratio", [](auto& c) -> auto& { return c.quench.P_init_ratio; }));
    f.push_back(real("quench", "offset_min", [](auto& c) -> auto& { return c.quench.offset_min; }));
    f.push_back(real("quench", "offset_max", [](auto& c) -> auto& { return c.quench.offset_max; }));
    f.push_back(integer<int>("quench", "offset_count", [](auto& c) -> auto& { return c.quench.offset_count; }));
    f.push_back(real("quench", "eps_rel", [](auto& c) -> auto& { return c.quench.eps_rel; }));
    f.push_back(real("quench", "t_settle_kappa", [](auto& c) -> auto& { return c.quench.t_settle_kappa; }));
    f.push_back(real("quench", "t_max_kappa", [](auto& c) -> auto& { return c.quench.t_max_kappa; }));
    f.push_back(real("quench", "dwell_kappa", [](auto& c) -> auto& { return c.quench.dwell_kappa; }));
    f.push_back(real("quench", "sample_kappa", [](auto& c) -> auto& { return c.quench.sample_kappa; }));
    f.push_back(real("quench", "trajectory_offset",
                     [](auto& c) -> auto& { return c.quench.trajectory_offset; }));

    f.push_back({"output", "dir",
                 [](ExperimentConfig& c, std::string_view v) { c.output.dir = std::string(v); },
                 [](const ExperimentConfig& c) -> std::optional<std::string> { return c.output.dir; }});
    return f;
  }();
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what, key, 0);
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const SystemSection& s = c.system;
  const bool by_drive = s.nu_d_GHz.has_value();
  const bool by_delta = s.delta_a_MHz.has_value() || s.delta_m_MHz.has_value();
  if (by_drive && by_delta)
    throw ConfigError("conflicting detuning specification: give nu_d_GHz or delta_a_MHz/delta_m_MHz, not both",
                      s.delta_a_MHz ? "system.delta_a_MHz" : "system.delta_m_MHz", 0);
  if (!by_drive && !by_delta)
    throw ConfigError("missing required key: system.nu_d_GHz or system.delta_a_MHz and system.delta_m_MHz",
                      "system.delta_a_MHz", 0);
  if (by_drive) {
    require(s.nu_m_GHz.has_value(), "system.nu_m_GHz", "missing required key (needed with nu_d_GHz)");
    require(*s.nu_d_GHz > 0, "system.nu_d_GHz", "must be positive");
  } else {
    require(s.delta_a_MHz.has_value(), "system.delta_a_MHz", "missing required key");
    require(s.delta_m_MHz.has_value(), "system.delta_m_MHz", "missing required key");
    require(!s.nu_m_GHz.has_value(), "system.nu_m_GHz",
            "conflicting detuning specification: nu_m follows from the detunings");
  }
  require(s.nu_a_GHz > 0, "system.nu_a_GHz", "must be positive");
  require(s.kappa_a_MHz > 0, "system.kappa_a_MHz", "must be positive");
  require(s.kappa_m_MHz > 0, "system.kappa_m_MHz", "must be positive");
  require(s.g_MHz >= 0, "system.g_MHz", "must be nonnegative");
  require(std::isfinite(s.K_nHz), "system.K_nHz", "must be finite");
  require(s.J_over_kappa_a >= 0, "system.J_over_kappa_a", "must be nonnegative");
  require(s.P_d_mW >= 0, "system.P_d_mW", "must be nonnegative");
  validate(to_params(s));

  const SweepSection& w = c.sweep;
  require(w.P_min_mW > 0, "sweep.P_min_mW", "must be positive");
  require(w.P_count >= 1, "sweep.P_count", "must be at least 1");
  require(w.J_count >= 1, "sweep.J_count", "must be at least 1");
  require(w.J_min >= 0, "sweep.J_min", "must be nonnegative");
  require(w.P_max_mW > w.P_min_mW || (w.P_count == 1 && w.P_max_mW == w.P_min_mW), "sweep.P_max_mW",
          "grid must be sorted (P_max_mW > P_min_mW)");
  require(w.J_max > w.J_min || (w.J_count == 1 && w.J_max == w.J_min), "sweep.J_max",
          "grid must be sorted (J_max > J_min)");

  const SolverSection& v = c.solver;
  require(v.lattice >= 1, "solver.lattice", "must be at least 1");
  require(v.phase_offsets >= 1, "solver.phase_offsets", "must be at least 1");
  require(v.dedup_tol > 0, "solver.dedup_tol", "tolerance must be positive");
  require(v.newton_rel_tol > 0, "solver.newton_rel_tol", "tolerance must be positive");
  require(v.newton_max_iter >= 1, "solver.newton_max_iter", "must be at least 1");
  require(v.ode_rel_tol > 0, "solver.ode_rel_tol", "tolerance must be positive");
  require(v.continuation_max_step > 0, "solver.continuation_max_step", "must be positive");

  const QuenchSection& q = c.quench;
  require(q.P_init_ratio > 0 && q.P_init_ratio != 1, "quench.P_init_ratio", "must be positive and not 1");
  require(q.offset_min > 0, "quench.offset_min", "must be positive");
  require(q.offset_max > q.offset_min && q.offset_max < 1, "quench.offset_max",
          "must exceed offset_min and stay below 1");
  require(q.offset_count >= 2, "quench.offset_count", "must be at least 2");
  require(q.eps_rel > 0, "quench.eps_rel", "tolerance must be positive");
  require(q.t_settle_kappa > 0, "quench.t_settle_kappa", "must be positive");
  require(q.t_max_kappa > 0, "quench.t_max_kappa", "must be positive");
  require(q.dwell_kappa > 0, "quench.dwell_kappa", "must be positive");
  require(q.sample_kappa > 0, "quench.sample_kappa", "must be positive");
  require(q.trajectory_offset > 0 && q.trajectory_offset < 1, "quench.trajectory_offset", "must lie in (0, 1)");

  require(!c.output.dir.empty(), "output.dir", "must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()), "", int(e.line()));
  }

  ExperimentConfig c;
  c.system.delta_a_MHz.reset();
  c.system.delta_m_MHz.reset();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      const int line = line_of(text, "", section);
      throw ConfigError(fmt::format("line {}: key '{}' outside a section", line, section), section, line);
    }
    bool known_section = false;
    for (const Field& f : fields()) known_section |= f.section == section;
    if (!known_section) {
      const int line = line_of(text, section, "");
      throw ConfigError(fmt::format("line {}: unknown section [{}]", line, section), section, line);
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const int line = line_of(text, section, key);
      const Field* match = nullptr;
      for (const Field& f : fields())
        if (f.section == section && f.key == key) match = &f;
      if (!match) throw ConfigError(fmt::format("line {}: unknown key '{}'", line, full), full, line);
      try {
        match->set(c, trim(node.data()));
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("line {}: {}", line, e.what()), full, line);
      }
    }
  }
  try {
    validate(c);
  } catch (const ConfigError& e) {
    const auto dot = e.key.find('.');
    const int line = dot == std::string::npos ? 0 : line_of(text, e.key.substr(0, dot), e.key.substr(dot + 1));
    throw ConfigError(line > 0 ? fmt::format("line {}: {}", line, e.what()) : std::string(e.what()), e.key, line);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), "system", 0);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    const auto v = f.get(c);
    if (!v) continue;
    if (f.section != section) {
      if (!section.empty()) out += '\n';
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + *v + "\n";
  }
  return out;
}

SystemParams to_params(const SystemSection& s) {
  SystemParams p;
  p.nu_a = s.nu_a_GHz * 1e9;
  if (s.nu_d_GHz) {
    p.nu_d = *s.nu_d_GHz * 1e9;
    p.nu_m = s.nu_m_GHz.value_or(s.nu_a_GHz) * 1e9;
  } else {
    p.nu_d = p.nu_a - s.delta_a_MHz.value_or(0) * 1e6;
    p.nu_m = p.nu_d + s.delta_m_MHz.value_or(0) * 1e6;
  }
  p.kappa_a = s.kappa_a_MHz * 1e6;
  p.kappa_m = s.kappa_m_MHz * 1e6;
  p.g = s.g_MHz * 1e6;
  p.K = s.K_nHz / 1e9;
  p.J = s.J_over_kappa_a;
  p.P_d = s.P_d_mW / 1e3;
  return p;
}

MultistartOptions to_multistart(const SolverSection& s) {
  MultistartOptions o;
  o.seed = s.seed;
  o.occupation_lattice = s.lattice;
  o.phase_offsets = s.phase_offsets;
  o.dedup_tol = s.dedup_tol;
  o.newton.rel_tol = s.newton_rel_tol;
  o.newton.max_iterations = s.newton_max_iter;
  return o;
}

IntegrationOptions to_integration(const SolverSection& s) {
  IntegrationOptions o;
  o.rel_tol = s.ode_rel_tol;
  return o;
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace magdimer
