#pragma once

// Flat result rows shared by the CLI and the acceptance runner. Columns keep
// insertion order; the wall-clock duration is always written last so that
// determinism checks can drop it.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bose {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct ReportRow {
  std::vector<std::pair<std::string, Cell>> cells;
  double duration_s = 0.0;

  ReportRow& set(std::string key, Cell value);
  const Cell* find(const std::string& key) const;
  double number(const std::string& key) const;  // DomainError if absent or not numeric
};

inline constexpr const char* kDurationColumn = "duration_s";

// Header plus one line per row; doubles with 17 significant digits. All rows
// must carry the same keys in the same order.
void emit_csv(const std::vector<ReportRow>& rows, std::ostream& os, bool with_duration = true);

// Array of objects whose keys equal the CSV header.
void emit_json(const std::vector<ReportRow>& rows, std::ostream& os, bool with_duration = true);

std::string format_cell(const Cell& cell);

// Splits one CSV line written by emit_csv (handles quoted fields).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace bose
