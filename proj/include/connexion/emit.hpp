#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "connexion/verify.hpp"

namespace connexion {

enum class Format { Json, Csv, Text };

std::optional<Format> parse_format(const std::string& name);

/// One value in a result record.
using Cell = std::variant<std::string, long long, bool, Quantity>;

/// Ordered (name, value) pairs. Every record of one output should share the
/// same field names so the CSV rendering is rectangular.
using Record = std::vector<std::pair<std::string, Cell>>;

struct Output {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Record> results;
  std::vector<CheckRecord> checks;
};

/// JSON: {"command", "config", "results", "checks"}; quantities become
/// {"exact", "decimal", "provenance"} with exact null when absent.
std::string to_json(const Output& out);

/// RFC-4180 table of `results` (of `checks` when there are no results) with
/// a header row and CRLF line ends. A
/// quantity column `x` expands to `x`, `x_exact` (only when some row has an
/// exact value) and `x_provenance`.
std::string to_csv(const Output& out);

/// Aligned human-readable listing.
std::string to_text(const Output& out);

std::string render(const Output& out, Format format);

/// Record form of a check, for tables of checks.
Record check_record(const CheckRecord& c);

}  // namespace connexion
