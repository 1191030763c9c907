#include "connexion/emit.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace connexion {

std::optional<Format> parse_format(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "text") return Format::Text;
  return std::nullopt;
}

namespace {

using Json = nlohmann::ordered_json;

Json quantity_json(const Quantity& q) {
  Json j;
  j["exact"] = q.exact ? Json(q.exact->to_string()) : Json(nullptr);
  j["decimal"] = q.decimal;
  j["provenance"] = to_string(q.provenance);
  return j;
}

Json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Quantity>) {
          return quantity_json(v);
        } else {
          return Json(v);
        }
      },
      cell);
}

std::string plain(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else {
          return v.decimal;
        }
      },
      cell);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const Cell* find_cell(const Record& r, const std::string& name) {
  for (const auto& [key, value] : r) {
    if (key == name) return &value;
  }
  return nullptr;
}

}  // namespace

Record check_record(const CheckRecord& c) {
  return {{"id", c.id},
          {"name", c.name},
          {"passed", c.passed},
          {"measured", c.measured},
          {"bound", c.bound},
          {"note", c.note}};
}

std::string to_json(const Output& out) {
  Json root;
  root["command"] = out.command;
  Json config = Json::object();
  for (const auto& [k, v] : out.config) config[k] = v;
  root["config"] = config;
  Json results = Json::array();
  for (const Record& r : out.results) {
    Json row = Json::object();
    for (const auto& [k, v] : r) row[k] = cell_json(v);
    results.push_back(row);
  }
  root["results"] = results;
  Json checks = Json::array();
  for (const CheckRecord& c : out.checks) {
    Json row = Json::object();
    for (const auto& [k, v] : check_record(c)) row[k] = cell_json(v);
    checks.push_back(row);
  }
  root["checks"] = checks;
  return root.dump(2) + "\n";
}

std::string to_csv(const Output& out) {
  if (out.results.empty() && !out.checks.empty()) {
    Output table = out;
    for (const CheckRecord& c : out.checks) table.results.push_back(check_record(c));
    return to_csv(table);
  }
  // Column layout comes from the first record; each quantity column may
  // grow an _exact companion and always has a _provenance one.
  struct Column {
    std::string name;
    bool quantity = false;
    bool with_exact = false;
  };
  std::vector<Column> columns;
  if (!out.results.empty()) {
    for (const auto& [name, cell] : out.results.front()) {
      Column col{name, std::holds_alternative<Quantity>(cell), false};
      if (col.quantity) {
        col.with_exact = std::any_of(out.results.begin(), out.results.end(), [&](const Record& r) {
          const Cell* c = find_cell(r, name);
          return c && std::holds_alternative<Quantity>(*c) && std::get<Quantity>(*c).exact.has_value();
        });
      }
      columns.push_back(col);
    }
  }
  std::string text;
  auto emit_row = [&text](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text += ',';
      text += csv_field(fields[i]);
    }
    text += "\r\n";
  };
  std::vector<std::string> header;
  for (const Column& c : columns) {
    header.push_back(c.name);
    if (c.with_exact) header.push_back(c.name + "_exact");
    if (c.quantity) header.push_back(c.name + "_provenance");
  }
  emit_row(header);
  for (const Record& r : out.results) {
    std::vector<std::string> fields;
    for (const Column& c : columns) {
      const Cell* cell = find_cell(r, c.name);
      const Quantity* q = cell ? std::get_if<Quantity>(cell) : nullptr;
      fields.push_back(cell ? plain(*cell) : "");
      if (c.with_exact) fields.push_back(q && q->exact ? q->exact->to_string() : "");
      if (c.quantity) fields.push_back(q ? to_string(q->provenance) : "");
    }
    emit_row(fields);
  }
  return text;
}

std::string to_text(const Output& out) {
  std::ostringstream os;
  os << out.command << "\n";
  for (const auto& [k, v] : out.config) os << "  " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    os << "\n";
    std::size_t width = 0;
    for (const auto& field : out.results[i]) width = std::max(width, field.first.size());
    for (const auto& [k, v] : out.results[i]) {
      os << "  " << k << std::string(width - k.size(), ' ') << "  " << plain(v);
      if (const auto* q = std::get_if<Quantity>(&v)) {
        if (q->exact && q->exact->to_string() != q->decimal) os << "  (= " << q->exact->to_string() << ")";
        os << "  [" << to_string(q->provenance) << "]";
      }
      os << "\n";
    }
  }
  if (!out.checks.empty()) os << "\n";
  for (const CheckRecord& c : out.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.id << "  " << c.name << "\n"
       << "     measured " << c.measured.decimal << " [" << to_string(c.measured.provenance) << "]\n"
       << "     bound    " << c.bound << "\n";
    if (!c.note.empty()) os << "     note     " << c.note << "\n";
  }
  return os.str();
}

std::string render(const Output& out, Format format) {
  switch (format) {
    case Format::Json: return to_json(out);
    case Format::Csv: return to_csv(out);
    case Format::Text: return to_text(out);
  }
  return {};
}

}  // namespace connexion
