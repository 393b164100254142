#include "occsel/tabular.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "occsel/errors.hpp"

namespace occsel {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

}  // namespace

int Table::col(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return int(j);
  return -1;
}

int Table::require_col(const std::string& name) const {
  int j = col(name);
  if (j < 0) throw DataError("missing column '" + name + "'");
  return j;
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw DataError("row width " + std::to_string(cells.size()) + " != header width " +
                    std::to_string(columns.size()));
  rows.push_back(std::move(cells));
}

Table read_delimited(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  Table t;
  t.columns = split(line, delim);
  if (t.columns.empty() || (t.columns.size() == 1 && t.columns[0].empty()))
    throw DataError("'" + path + "' has an empty header row");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, delim);
    if (cells.size() != t.columns.size())
      throw DataError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                      std::to_string(t.columns.size()) + " cells, found " +
                      std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.rows.empty()) throw DataError("'" + path + "' has a header but no data rows");
  return t;
}

void write_delimited(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    out << (j ? "\t" : "") << table.columns[j];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "\t" : "") << row[j];
    out << "\n";
  }
}

double parse_number(const std::string& cell, const std::string& context) {
  const std::string s = trim(cell);
  if (s.empty()) throw DataError(context + ": empty numeric cell");
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw DataError(context + ": cannot parse '" + s + "' as a number");
  return value;
}

long long parse_integer(const std::string& cell, const std::string& context) {
  const std::string s = trim(cell);
  if (s.empty()) throw DataError(context + ": empty integer cell");
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(context + ": cannot parse '" + s + "' as an integer");
  return value;
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace occsel
