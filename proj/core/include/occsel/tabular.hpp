#pragma once

#include <string>
#include <vector>

namespace occsel {

// Minimal delimited-text table: one header row, string cells. The reader
// sniffs tab vs comma from the header line; writers always emit tabs.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;          // -1 when absent
  int require_col(const std::string& name) const;  // DataError when absent
  void add_row(std::vector<std::string> cells);
};

Table read_delimited(const std::string& path);
void write_delimited(const std::string& path, const Table& table);

// Numeric cell parse with file/row/column context in the error message.
double parse_number(const std::string& cell, const std::string& context);
long long parse_integer(const std::string& cell, const std::string& context);

std::string format_double(double value);  // shortest round-trip text

}  // namespace occsel
