#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace magdimer {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column order of a table kind does not match its pinned schema.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::string column)
      : std::runtime_error(what), column(std::move(column)) {}
  std::string column;
};

/// Table kinds: steady, branch, phase, trajectory, quench_scan, fluct.
const std::vector<std::string>& schema(std::string_view kind);

struct CsvTable {
  std::string kind;
  std::string tool_version;
  std::string config_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Round-trip formatting (%.17g).
std::string format_number(double v);

/// '#' comment header (tool, kind, config hash, columns), then RFC 4180 rows.
std::string render_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Checks columns against schema(kind); SchemaError names the first
/// offending column.
void check_schema(const CsvTable& table);

/// The data part of a rendered table (comment header removed).
std::string csv_body(std::string_view text);

void write_file(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

/// Whitespace-separated blocks for gnuplot. Branch tables give one block per
/// branch, phase tables give nonuniform matrix blocks (region code, max |Z|),
/// quench scans give converged (delta, tau) pairs with their logarithms.
std::string emit_plot_data(const CsvTable& table);

}  // namespace magdimer
