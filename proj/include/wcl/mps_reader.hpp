#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wcl {

/// Linear program as read from an MPS file (fixed or free format).
struct MpsModel {
  struct Row {
    std::string name;
    char type = 'E';  // 'N', 'L', 'G' or 'E'
    double rhs = 0.0;
  };
  struct Column {
    std::string name;
    double objective = 0.0;
    std::vector<std::pair<std::size_t, double>> entries;  // (row index, coefficient)
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool integer = false;
  };

  std::string name;
  bool maximize = false;
  std::string objective_row;
  std::vector<Row> rows;  // constraint rows only; the objective row is kept apart
  std::vector<Column> columns;
  std::unordered_map<std::string, std::size_t> row_index;
  std::unordered_map<std::string, std::size_t> column_index;

  std::size_t nonzeros() const;
  /// Largest violation of any row or bound at the given column values.
  double max_violation(const std::vector<double>& values) const;
  double objective_value(const std::vector<double>& values) const;
};

/// Throws InputError on malformed input.
MpsModel parse_mps(std::string_view text);

}  // namespace wcl
