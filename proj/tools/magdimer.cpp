#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "magdimer/config.hpp"
#include "magdimer/csv.hpp"
#include "magdimer/experiments.hpp"

namespace {

using namespace magdimer;

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<double> p_d_mW;
  std::optional<double> j;
  std::optional<std::string> grid;
  std::optional<std::uint64_t> seed;
};

int report(int code, const std::string& kind, const std::string& message,
           const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
  j.update(extra);
  std::cerr << j.dump() << '\n';
  return code;
}

ExperimentConfig apply(const Overrides& o) {
  ExperimentConfig c = load_config(o.config_path);
  if (o.out) c.output.dir = *o.out;
  if (o.p_d_mW) c.system.P_d_mW = *o.p_d_mW;
  if (o.j) c.system.J_over_kappa_a = *o.j;
  if (o.seed) c.solver.seed = *o.seed;
  if (o.grid) {
    const auto x = o.grid->find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("no 'x'");
      std::size_t used = 0;
      c.sweep.P_count = std::stoi(o.grid->substr(0, x), &used);
      if (used != x) throw std::invalid_argument("trailing characters");
      c.sweep.J_count = std::stoi(o.grid->substr(x + 1), &used);
      if (used != o.grid->size() - x - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("--grid expects NxM, got '" + *o.grid + "'", "--grid", 0);
    }
  }
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-magnon dimer simulator"};
  app.require_subcommand(1);
  Overrides o;
  std::string subcommand;

  for (const char* name : {"steady", "branch", "phase-diagram", "quench", "fluct"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--p-d", o.p_d_mW, "drive power in mW");
    sub->add_option("--j", o.j, "tunneling J as a multiple of kappa_a");
    sub->add_option("--grid", o.grid, "sweep grid as N_P x N_J, e.g. 101x41");
    sub->add_option("--seed", o.seed, "multistart RNG seed");
    sub->callback([&subcommand, name] { subcommand = name; });
  }

  std::string csv_path;
  std::optional<std::string> plot_out;
  CLI::App* plot = app.add_subcommand("plot", "reshape a CSV artifact into gnuplot blocks");
  plot->add_option("csv", csv_path, "artifact written by another subcommand")->required();
  plot->add_option("--out", plot_out, "output file (default stdout)");
  plot->callback([&subcommand] { subcommand = "plot"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report(2, "usage", e.what());
  }

  try {
    if (subcommand == "plot") {
      const std::string text = emit_plot_data(parse_csv(read_file(csv_path)));
      if (plot_out) write_file(*plot_out, text);
      else std::cout << text;
      return 0;
    }
    const ExperimentConfig c = apply(o);
    for (const std::string& path : write_artifacts(run_subcommand(subcommand, c), c.output.dir))
      std::cout << path << '\n';
    return 0;
  } catch (const ConfigError& e) {
    return report(2, "config", e.what(), {{"key", e.key}, {"line", e.line}});
  } catch (const ParameterError& e) {
    return report(2, "config", e.what());
  } catch (const IoError& e) {
    return report(4, "io", e.what());
  } catch (const SchemaError& e) {
    return report(4, "schema", e.what(), {{"column", e.column}});
  } catch (const SolverError& e) {
    return report(3, "solver", e.what());
  } catch (const NumericError& e) {
    return report(3, "numeric", e.what());
  } catch (const DomainError& e) {
    return report(3, "domain", e.what());
  }
}
