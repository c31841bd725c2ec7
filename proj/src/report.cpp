#include "bose/report.hpp"

#include <cstdio>
#include <ostream>

#include "json.hpp"

#include "bose/errors.hpp"

namespace bose {

ReportRow& ReportRow::set(std::string key, Cell value) {
  for (auto& [k, v] : cells)
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  cells.emplace_back(std::move(key), std::move(value));
  return *this;
}

const Cell* ReportRow::find(const std::string& key) const {
  for (const auto& [k, v] : cells)
    if (k == key) return &v;
  return nullptr;
}

double ReportRow::number(const std::string& key) const {
  const Cell* c = find(key);
  if (c == nullptr) throw DomainError("ReportRow: no column " + key);
  if (const auto* d = std::get_if<double>(c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(c)) return static_cast<double>(*i);
  throw DomainError("ReportRow: column " + key + " is not numeric");
}

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void check_shape(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows) {
    if (r.cells.size() != rows.front().cells.size())
      throw DomainError("emit: rows have different column counts");
    for (std::size_t i = 0; i < r.cells.size(); ++i)
      if (r.cells[i].first != rows.front().cells[i].first)
        throw DomainError("emit: column " + r.cells[i].first + " out of order");
  }
}

}  // namespace

std::string format_cell(const Cell& cell) {
  struct {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  } visit;
  return std::visit(visit, cell);
}

void emit_csv(const std::vector<ReportRow>& rows, std::ostream& os, bool with_duration) {
  check_shape(rows);
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << quote(fields[i]);
    os << '\n';
  };
  std::vector<std::string> header;
  if (!rows.empty())
    for (const auto& [k, v] : rows.front().cells) header.push_back(k);
  if (with_duration) header.emplace_back(kDurationColumn);
  line(header);
  for (const auto& r : rows) {
    std::vector<std::string> fields;
    for (const auto& [k, v] : r.cells) fields.push_back(format_cell(v));
    if (with_duration) fields.push_back(format_double(r.duration_s));
    line(fields);
  }
  if (!os) throw std::runtime_error("emit_csv: write failed");
}

void emit_json(const std::vector<ReportRow>& rows, std::ostream& os, bool with_duration) {
  check_shape(rows);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.cells)
      std::visit([&](const auto& x) { obj[k] = x; }, v);
    if (with_duration) obj[kDurationColumn] = r.duration_s;
    arr.push_back(std::move(obj));
  }
  os << arr.dump(2) << '\n';
  if (!os) throw std::runtime_error("emit_json: write failed");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace bose
