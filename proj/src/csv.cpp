#include "magdimer/csv.hpp"

#include <algorithm>
#include <fstream>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

namespace magdimer {
namespace {

const std::map<std::string, std::vector<std::string>, std::less<>>& schemas() {
  static const std::map<std::string, std::vector<std::string>, std::less<>> s = {
      {"steady",
       {"index", "class", "stability", "n_aL", "n_mL", "n_aR", "n_mR", "Z", "max_Re_eig", "Re_aL",
        "Im_aL", "Re_mL", "Im_mL", "Re_aR", "Im_aR", "Re_mR", "Im_mR"}},
      {"branch", {"branch", "P_d", "n_mL", "n_mR", "n_aL", "n_aR", "Z", "max_Re_eig", "class", "fold_flag"}},
      {"phase", {"P_d", "J", "region", "n_stable", "max_abs_Z", "hopf_flag"}},
      {"trajectory",
       {"t", "Re_aL", "Im_aL", "Re_mL", "Im_mL", "Re_aR", "Im_aR", "Re_mR", "Im_mR", "n_mL", "n_mR"}},
      {"quench_scan", {"P_final", "delta", "tau", "converged", "final_class"}},
      {"fluct",
       {"P_d", "branch_class_pair", "pairing", "fidelity", "infidelity", "mutual_information", "E_N",
        "nu_plus", "nu_minus", "lyapunov_residual"}},
  };
  return s;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::size_t column_index(const CsvTable& t, std::string_view name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw SchemaError(fmt::format("missing column '{}'", name), std::string(name));
  return std::size_t(it - t.columns.begin());
}

int region_code(const std::string& r) {
  if (r == "0S") return 0;
  if (r == "1S") return 1;
  if (r == "2S") return 2;
  if (r == "2S-2AS") return 3;
  return -1;
}

std::string join_row(const std::vector<std::string>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ' ';
    out += row[i].empty() ? std::string("NaN") : row[i];
  }
  return out;
}

}  // namespace

const std::vector<std::string>& schema(std::string_view kind) {
  const auto it = schemas().find(kind);
  if (it == schemas().end()) throw SchemaError(fmt::format("unknown table kind '{}'", kind), "");
  return it->second;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string render_csv(const CsvTable& t) {
  std::string out;
  out += fmt::format("# tool: magdimer {}\n", t.tool_version);
  out += fmt::format("# kind: {}\n", t.kind);
  out += fmt::format("# config_hash: {}\n", t.config_hash);
  std::string cols;
  for (std::size_t i = 0; i < t.columns.size(); ++i) cols += (i ? "," : "") + t.columns[i];
  out += "# columns: " + cols + "\n";
  out += cols + "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw SchemaError(fmt::format("row has {} fields, expected {}", row.size(), t.columns.size()), "");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + quote(row[i]);
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  bool have_columns = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      auto value_of = [&](std::string_view prefix) -> std::optional<std::string> {
        const auto p = body.find(prefix);
        if (p == std::string_view::npos) return std::nullopt;
        std::string v(body.substr(p + prefix.size()));
        v.erase(0, v.find_first_not_of(' '));
        return v;
      };
      if (auto v = value_of("tool: magdimer")) t.tool_version = *v;
      else if (auto k = value_of("kind:")) t.kind = *k;
      else if (auto h = value_of("config_hash:")) t.config_hash = *h;
      continue;
    }
    if (!have_columns) {
      t.columns = split_record(line);
      have_columns = true;
    } else {
      t.rows.push_back(split_record(line));
      if (t.rows.back().size() != t.columns.size())
        throw SchemaError(fmt::format("data row {} has {} fields, expected {}", t.rows.size(),
                                      t.rows.back().size(), t.columns.size()),
                          "");
    }
  }
  if (!have_columns) throw SchemaError("table has no column header", "");
  return t;
}

void check_schema(const CsvTable& t) {
  if (t.kind.empty()) throw SchemaError("table header lacks a kind", "");
  const auto& expected = schema(t.kind);
  for (std::size_t i = 0; i < std::max(expected.size(), t.columns.size()); ++i) {
    if (i >= t.columns.size())
      throw SchemaError(fmt::format("{} table is missing column '{}'", t.kind, expected[i]), expected[i]);
    if (i >= expected.size() || t.columns[i] != expected[i])
      throw SchemaError(fmt::format("{} table has unexpected column '{}' at position {}", t.kind,
                                    t.columns[i], i),
                        t.columns[i]);
  }
}

std::string csv_body(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    if (text[pos] != '#') out.append(text.substr(pos, end - pos)).push_back('\n');
    pos = end + 1;
  }
  return out;
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), std::streamsize(contents.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string emit_plot_data(const CsvTable& t) {
  check_schema(t);
  std::string out = "# " + t.kind + ": " + join_row(t.columns) + "\n";

  if (t.kind == "branch") {
    const std::size_t b = column_index(t, "branch");
    std::string current;
    bool first = true;
    for (const auto& row : t.rows) {
      if (first || row[b] != current) {
        if (!first) out += "\n\n";
        current = row[b];
        out += "# branch " + current + "\n";
        first = false;
      }
      std::vector<std::string> cells = row;
      cells[column_index(t, "class")] = fmt::format("\"{}\"", row[column_index(t, "class")]);
      out += join_row(cells) + "\n";
    }
    return out;
  }

  if (t.kind == "phase") {
    const std::size_t ip = column_index(t, "P_d"), ij = column_index(t, "J");
    std::vector<std::string> P, J;
    for (const auto& row : t.rows) {
      if (std::find(P.begin(), P.end(), row[ip]) == P.end()) P.push_back(row[ip]);
      if (std::find(J.begin(), J.end(), row[ij]) == J.end()) J.push_back(row[ij]);
    }
    if (P.size() * J.size() != t.rows.size())
      throw SchemaError("phase table is not a full grid", "P_d");
    auto matrix = [&](const std::string& title, auto value) {
      out += "# matrix " + title + " rows=J cols=P_d\n";
      out += std::to_string(P.size());
      for (const auto& p : P) out += " " + p;
      out += '\n';
      for (std::size_t j = 0; j < J.size(); ++j) {
        out += J[j];
        for (std::size_t p = 0; p < P.size(); ++p) out += " " + value(t.rows[j * P.size() + p]);
        out += '\n';
      }
    };
    matrix("region_code", [&](const auto& row) {
      return std::to_string(region_code(row[column_index(t, "region")]));
    });
    out += "\n\n";
    matrix("max_abs_Z", [&](const auto& row) { return row[column_index(t, "max_abs_Z")]; });
    return out;
  }

  if (t.kind == "quench_scan") {
    const std::size_t id = column_index(t, "delta"), it = column_index(t, "tau"),
                      ic = column_index(t, "converged");
    std::vector<std::pair<double, double>> pairs;
    for (const auto& row : t.rows)
      if (row[ic] == "1") pairs.emplace_back(std::stod(row[id]), std::stod(row[it]));
    std::sort(pairs.begin(), pairs.end());
    out = "# delta tau log10_delta log10_tau\n";
    for (auto [d, tau] : pairs)
      out += fmt::format("{:.17g} {:.17g} {:.17g} {:.17g}\n", d, tau, std::log10(d), std::log10(tau));
    return out;
  }

  if (t.kind == "fluct") {
    const std::size_t ip = column_index(t, "pairing");
    for (const std::string pairing : {"within", "cross"}) {
      out += "# pairing " + pairing + "\n";
      for (const auto& row : t.rows)
        if (row[ip] == pairing) {
          std::vector<std::string> cells = row;
          cells[column_index(t, "branch_class_pair")] = "\"" + row[column_index(t, "branch_class_pair")] + "\"";
          out += join_row(cells) + "\n";
        }
      if (pairing == std::string("within")) out += "\n\n";
    }
    return out;
  }

  for (const auto& row : t.rows) out += join_row(row) + "\n";
  return out;
}

}  // namespace magdimer
