#pragma once
// Numeric CSV tables with a fixed column order. Values are written with 17
// significant digits so that reading them back is exact.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lpapp {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool has(const std::string& name) const;
  std::size_t index(const std::string& name) const;  // throws when absent
  std::vector<double> column(const std::string& name) const;
  void add_row(std::vector<double> row);

  void write_csv(std::ostream& os) const;
  void save(const std::filesystem::path& file) const;
  static Table read_csv(std::istream& is);
  static Table load(const std::filesystem::path& file);
};

}  // namespace lpapp
