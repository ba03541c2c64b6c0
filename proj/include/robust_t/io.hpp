#pragma once

// Sample ingestion from delimited text, quantile-table persistence and JSON
// encodings of results.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "robust_t/errors.hpp"
#include "robust_t/inference.hpp"
#include "robust_t/robust_estimators.hpp"

namespace robust_t {

inline constexpr std::string_view kToolName = "robust-t";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kTableFormat = "robust-t-quantile-table";
inline constexpr int kTableSchemaVersion = 1;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline char detect_delimiter(std::string_view line) {
  for (char c : {',', '\t', ';'}) {
    if (line.find(c) != std::string_view::npos) return c;
  }
  return '\0';
}

inline std::vector<std::string_view> split_cells(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  if (delim == '\0') {
    cells.push_back(trim(line));
    return cells;
  }
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

// Locale-independent decimal parse of the whole cell.
inline std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses one numeric column from delimited text.
///
/// The delimiter is the first of ',', tab or ';' found in the first non-blank
/// line; without one, each line is a single cell. `column` is a header name or
/// a 1-based column number and defaults to the first column. The first row is
/// a header when its selected cell is not a number. Blank lines are skipped.
/// Rows in error messages are 1-based line numbers.
inline Sample parse_sample(std::string_view text, const std::optional<std::string>& column = {}) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
    ++line_no;
    if (!detail::trim(line).empty()) lines.emplace_back(line_no, line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (lines.empty()) throw ParseError("input contains no data rows");

  const char delim = detail::detect_delimiter(lines.front().second);
  const auto first_cells = detail::split_cells(lines.front().second, delim);

  std::size_t index = 0;
  bool by_name = false;
  if (column) {
    const auto it = std::find(first_cells.begin(), first_cells.end(), detail::trim(*column));
    if (it != first_cells.end() && !detail::parse_number(*it)) {
      index = static_cast<std::size_t>(it - first_cells.begin());
      by_name = true;
    } else if (const auto number = detail::parse_index(detail::trim(*column)); number && *number >= 1) {
      index = *number - 1;
    } else {
      throw ParseError("column '" + *column + "' not found in header", lines.front().first);
    }
    if (index >= first_cells.size()) {
      throw ParseError("column " + std::to_string(index + 1) + " does not exist; first row has " +
                           std::to_string(first_cells.size()) + " columns",
                       lines.front().first);
    }
  }

  std::size_t first_data = 0;
  if (by_name || !detail::parse_number(first_cells[index])) first_data = 1;

  std::vector<double> values;
  values.reserve(lines.size());
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const auto [row, line] = lines[i];
    const auto cells = detail::split_cells(line, delim);
    if (index >= cells.size()) {
      throw ParseError("row " + std::to_string(row) + ": missing column " +
                           std::to_string(index + 1),
                       row, index + 1);
    }
    const auto value = detail::parse_number(cells[index]);
    if (!value) {
      throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(index + 1) +
                           ": cannot parse '" + std::string(cells[index]) + "' as a finite number",
                       row, index + 1);
    }
    values.push_back(*value);
  }
  if (values.empty()) throw ParseError("selected column contains no data rows");
  return Sample(std::move(values));
}

inline Sample read_sample(const std::string& path, const std::optional<std::string>& column = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_sample(buf.str(), column);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.row(), e.column());
  }
}

// ---------------------------------------------------------------------------
// Quantile tables

inline nlohmann::json table_to_json(const QuantileTable& table) {
  nlohmann::json j;
  j["format"] = kTableFormat;
  j["schema_version"] = kTableSchemaVersion;
  j["n"] = table.n;
  j["reps"] = table.reps;
  j["seed"] = table.rng.seed;
  j["stream"] = table.rng.stream;
  j["probs"] = table.probs;
  j["quantiles"] = table.quantiles;
  j["created_at"] = table.created_at;
  return j;
}

inline QuantileTable table_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw CorruptTableError("quantile table: document is not an object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw IncompatibleTableError("quantile table: missing schema_version");
  }
  if (j["schema_version"].get<int>() != kTableSchemaVersion) {
    throw IncompatibleTableError("quantile table: schema_version " +
                                 std::to_string(j["schema_version"].get<int>()) +
                                 " is not supported (expected " +
                                 std::to_string(kTableSchemaVersion) + ")");
  }
  if (j.value("format", std::string{}) != kTableFormat) {
    throw IncompatibleTableError("quantile table: unrecognized format tag");
  }
  for (const char* key : {"n", "reps", "seed", "stream", "probs", "quantiles"}) {
    if (!j.contains(key)) {
      throw IncompatibleTableError(std::string("quantile table: missing field '") + key + "'");
    }
  }
  QuantileTable table;
  try {
    table.n = j.at("n").get<std::size_t>();
    table.reps = j.at("reps").get<std::size_t>();
    table.rng.seed = j.at("seed").get<std::uint64_t>();
    table.rng.stream = j.at("stream").get<std::uint64_t>();
    table.probs = j.at("probs").get<std::vector<double>>();
    table.quantiles = j.at("quantiles").get<std::vector<double>>();
    table.created_at = j.value("created_at", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw CorruptTableError(std::string("quantile table: ") + e.what());
  }
  table.validate();
  return table;
}

inline void save_table(const QuantileTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write quantile table '" + path + "'");
  out << table_to_json(table).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing quantile table '" + path + "'");
}

inline QuantileTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open quantile table '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptTableError("quantile table '" + path + "': " + e.what());
  }
  return table_from_json(j);
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j;
  j["statistic_raw"] = r.statistic_raw;
  j["statistic_scaled"] = r.statistic_scaled;
  j["p_value"] = r.p_value;
  j["alternative"] = to_string(r.alternative);
  j["calibration"] = to_string(r.calibration);
  j["table_id"] = r.table_id ? nlohmann::json(*r.table_id) : nlohmann::json(nullptr);
  j["n"] = r.n;
  j["mu0"] = r.mu0;
  if (r.reject_at) {
    j["reject_at"] = {{"level", r.reject_at->level}, {"reject", r.reject_at->reject}};
  } else {
    j["reject_at"] = nullptr;
  }
  return j;
}

/// Report envelope. `results` must be a deterministic function of the
/// command arguments; the timestamp lives outside it.
inline nlohmann::json make_report(std::string_view command, nlohmann::json arguments,
                                  std::optional<std::uint64_t> seed, nlohmann::json results) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = {{"name", command}, {"arguments", std::move(arguments)}};
  j["command"]["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["results"] = std::move(results);
  j["generated_at"] = utc_timestamp();
  return j;
}

}  // namespace robust_t
