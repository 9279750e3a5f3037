#include "betareg/csv.hpp"

#include "betareg/linalg.hpp"

#include <cstdio>

namespace betareg {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(os), header_(std::move(header)) {
  if (header_.empty()) throw Error("csv: header must name at least one column");
  emit(header_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) {
    throw Error("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                std::to_string(header_.size()));
  }
  emit(cells);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void CsvWriter::emit(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i];
  }
  os_ << '\n';
}

}  // namespace betareg
