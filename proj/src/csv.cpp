#include "vswarm/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace vswarm::io {

std::string format_number(double v)
{
  if (v == 0.0) return "0";  // folds -0 into 0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvWriter::header(const std::vector<std::string>& names)
{
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) os_ << ',';
    os_ << names[i];
  }
  os_ << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& is)
{
  CsvTable t;
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw CsvParseError(n, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.lines.push_back(n);
  }
  if (t.header.empty()) throw CsvParseError(n, "missing header");
  return t;
}

std::size_t CsvTable::column(std::string_view name) const
{
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("csv: no column named " + std::string(name));
}

double CsvTable::number(std::size_t row, std::size_t col) const
{
  const auto& s = rows.at(row).at(col);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw CsvParseError(lines.at(row), "not a number: '" + s + "'");
  return v;
}

}  // namespace vswarm::io
