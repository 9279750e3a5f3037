#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace betareg {

/// Shortest round-trippable text for a double (17 significant digits).
std::string format_double(double v);

/// Comma-separated writer with a fixed header; every row must match the
/// header's column count. LF line endings, '.' decimal separator.
class CsvWriter {
public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);
  std::size_t columns() const { return header_.size(); }

private:
  void emit(const std::vector<std::string>& cells);

  std::ostream& os_;
  std::vector<std::string> header_;
};

}  // namespace betareg
