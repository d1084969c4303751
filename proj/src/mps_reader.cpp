#include "wcl/mps_reader.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "wcl/errors.hpp"

namespace wcl {

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("MPS line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

bool is_max_keyword(const std::string& s) { return s == "MAX" || s == "MAXIMIZE"; }
bool is_min_keyword(const std::string& s) { return s == "MIN" || s == "MINIMIZE"; }

}  // namespace

std::size_t MpsModel::nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.entries.size();
  return n;
}

double MpsModel::objective_value(const std::vector<double>& values) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < columns.size(); ++j) sum += columns[j].objective * values[j];
  return sum;
}

double MpsModel::max_violation(const std::vector<double>& values) const {
  std::vector<double> act(rows.size(), 0.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& c = columns[j];
    for (const auto& [r, coef] : c.entries) act[r] += coef * values[j];
    worst = std::max({worst, c.lower - values[j], values[j] - c.upper});
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    switch (rows[r].type) {
      case 'L': worst = std::max(worst, act[r] - rows[r].rhs); break;
      case 'G': worst = std::max(worst, rows[r].rhs - act[r]); break;
      case 'E': worst = std::max(worst, std::abs(act[r] - rows[r].rhs)); break;
      default: break;
    }
  }
  return worst;
}

MpsModel parse_mps(std::string_view text) {
  enum class Section { none, objsense, rows, columns, rhs, bounds, done };
  MpsModel m;
  Section section = Section::none;
  bool in_integer_block = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& msg) {
    throw InputError("MPS line " + std::to_string(line_no) + ": " + msg);
  };
  auto column_of = [&](const std::string& name) -> MpsModel::Column& {
    auto it = m.column_index.find(name);
    if (it == m.column_index.end()) fail("unknown column '" + name + "'");
    return m.columns[it->second];
  };
  // Adds a (row, value) pair to a column or the right-hand side.
  auto row_ref = [&](const std::string& name) -> std::size_t {
    if (name == m.objective_row) return SIZE_MAX;
    auto it = m.row_index.find(name);
    if (it == m.row_index.end()) fail("unknown row '" + name + "'");
    return it->second;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    auto tok = split(line);
    if (tok.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = tok[0];
      if (head == "NAME") {
        m.name = tok.size() > 1 ? tok[1] : "";
        section = Section::none;
      } else if (head == "OBJSENSE") {
        section = Section::objsense;
        if (tok.size() > 1) {
          if (is_max_keyword(tok[1])) m.maximize = true;
          else if (!is_min_keyword(tok[1])) fail("bad OBJSENSE '" + tok[1] + "'");
          section = Section::none;
        }
      } else if (head == "ROWS") {
        section = Section::rows;
      } else if (head == "COLUMNS") {
        section = Section::columns;
      } else if (head == "RHS") {
        section = Section::rhs;
      } else if (head == "BOUNDS") {
        section = Section::bounds;
      } else if (head == "RANGES") {
        fail("RANGES are not supported");
      } else if (head == "ENDATA") {
        section = Section::done;
        break;
      } else {
        fail("unknown section '" + head + "'");
      }
      continue;
    }

    switch (section) {
      case Section::objsense:
        if (is_max_keyword(tok[0])) m.maximize = true;
        else if (!is_min_keyword(tok[0])) fail("bad OBJSENSE '" + tok[0] + "'");
        section = Section::none;
        break;
      case Section::rows: {
        if (tok.size() != 2 || tok[0].size() != 1) fail("bad ROWS entry");
        const char type = tok[0][0];
        if (type == 'N') {
          if (m.objective_row.empty()) m.objective_row = tok[1];
          break;
        }
        if (type != 'L' && type != 'G' && type != 'E') fail("bad row type '" + tok[0] + "'");
        if (m.row_index.count(tok[1]) != 0) fail("duplicate row '" + tok[1] + "'");
        m.row_index.emplace(tok[1], m.rows.size());
        m.rows.push_back({tok[1], type, 0.0});
        break;
      }
      case Section::columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_integer_block = true;
          else if (tok[2] == "'INTEND'") in_integer_block = false;
          else fail("bad marker");
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) fail("bad COLUMNS entry");
        auto it = m.column_index.find(tok[0]);
        if (it == m.column_index.end()) {
          it = m.column_index.emplace(tok[0], m.columns.size()).first;
          MpsModel::Column c;
          c.name = tok[0];
          c.integer = in_integer_block;
          if (in_integer_block) c.upper = 1.0;
          m.columns.push_back(std::move(c));
        }
        auto& col = m.columns[it->second];
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const std::size_t r = row_ref(tok[k]);
          const double v = parse_double(tok[k + 1], line_no);
          if (r == SIZE_MAX) col.objective += v;
          else col.entries.emplace_back(r, v);
        }
        break;
      }
      case Section::rhs: {
        // The set name is optional.
        const std::size_t first = tok.size() % 2 == 1 ? 1 : 0;
        if (tok.size() < 2 || tok.size() > 5) fail("bad RHS entry");
        for (std::size_t k = first; k + 1 < tok.size(); k += 2) {
          const std::size_t r = row_ref(tok[k]);
          const double v = parse_double(tok[k + 1], line_no);
          if (r != SIZE_MAX) m.rows[r].rhs = v;
        }
        break;
      }
      case Section::bounds: {
        const std::string& type = tok[0];
        const bool has_value = type != "BV" && type != "FR" && type != "MI" && type != "PL";
        const std::size_t expected = has_value ? 4 : 3;
        std::size_t name_at = 2;
        if (tok.size() == expected - 1) name_at = 1;
        else if (tok.size() != expected) fail("bad BOUNDS entry");
        auto& col = column_of(tok[name_at]);
        const double v = has_value ? parse_double(tok[name_at + 1], line_no) : 0.0;
        const double inf = std::numeric_limits<double>::infinity();
        if (type == "UP") {
          col.upper = v;
          if (v < 0.0 && col.lower == 0.0) col.lower = -inf;
        } else if (type == "LO") {
          col.lower = v;
        } else if (type == "FX") {
          col.lower = col.upper = v;
        } else if (type == "BV") {
          col.lower = 0.0;
          col.upper = 1.0;
          col.integer = true;
        } else if (type == "FR") {
          col.lower = -inf;
          col.upper = inf;
        } else if (type == "MI") {
          col.lower = -inf;
        } else if (type == "PL") {
          col.upper = inf;
        } else if (type == "UI") {
          col.upper = v;
          col.integer = true;
        } else if (type == "LI") {
          col.lower = v;
          col.integer = true;
        } else {
          fail("bad bound type '" + type + "'");
        }
        break;
      }
      case Section::none:
      case Section::done:
        fail("data outside a section");
    }
  }
  if (section != Section::done) throw InputError("MPS input lacks ENDATA");
  if (m.objective_row.empty()) throw InputError("MPS input has no objective row");
  return m;
}

}  // namespace wcl
