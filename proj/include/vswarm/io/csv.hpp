#ifndef VSWARM_IO_CSV_HPP
#define VSWARM_IO_CSV_HPP

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace vswarm::io {

/// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

/// Comma-separated writer with LF line endings. Doubles are written in
/// shortest round-trip form so a parse gives back the same bits.
class CsvWriter
{
public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(const std::vector<std::string>& names);

  template <typename... Ts>
  void row(const Ts&... values)
  {
    bool first = true;
    ((put(values, first)), ...);
    os_ << '\n';
  }

private:
  template <typename T>
  void put(const T& v, bool& first)
  {
    if (!first) os_ << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>)
      os_ << format_number(static_cast<double>(v));
    else
      os_ << v;
  }

  std::ostream& os_;
};

class CsvParseError : public std::runtime_error
{
public:
  CsvParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }
  int line() const { return line_; }

private:
  int line_;
};

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;  ///< file line of each row

  /// Throws std::out_of_range for unknown names.
  std::size_t column(std::string_view name) const;
  /// Numeric cell; throws CsvParseError naming the 1-based file line.
  double number(std::size_t row, std::size_t col) const;
};

/// Reads a headed CSV without quoting. Every row must match the header width.
CsvTable read_csv(std::istream& is);

}  // namespace vswarm::io

#endif  // VSWARM_IO_CSV_HPP
