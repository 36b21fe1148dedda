#include "table.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lentparticle/error.hpp"

namespace lpapp {

bool Table::has(const std::string& name) const {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

std::size_t Table::index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  lp::fail(lp::ErrorKind::Schema, "table has no column '" + name + "'");
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t k = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) lp::fail(lp::ErrorKind::Domain, "table row has the wrong width");
  rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream& os) const {
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  std::string line;
  for (const auto& r : rows) {
    line.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += ',';
      line += fmt::format("{:.17g}", r[i]);
    }
    line += '\n';
    os << line;
  }
}

void Table::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) lp::fail(lp::ErrorKind::Numeric, "cannot write " + file.string());
  write_csv(out);
}

Table Table::read_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) lp::fail(lp::ErrorKind::Schema, "empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(t.columns.size());
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      // strtod accepts inf/nan spellings produced by fmt
      std::string cell(p, comma);
      char* stop = nullptr;
      v = std::strtod(cell.c_str(), &stop);
      if (cell.empty() || *stop != '\0') lp::fail(lp::ErrorKind::Schema, fmt::format("CSV line {}: bad number '{}'", lineno, cell));
      row.push_back(v);
      p = comma + 1;
      if (comma == end) break;
    }
    if (row.size() != t.columns.size()) lp::fail(lp::ErrorKind::Schema, fmt::format("CSV line {}: wrong field count", lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table Table::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) lp::fail(lp::ErrorKind::Schema, "cannot read " + file.string());
  return read_csv(in);
}

}  // namespace lpapp
