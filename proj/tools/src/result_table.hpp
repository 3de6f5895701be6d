#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace weaktime::cli {

// Rectangular table of reals with "#" metadata, serialized as CSV.
//
// Layout:
//   # <header lines>
//   col1,col2,...
//   # units: u1,u2,...
//   <rows>
//   # <footer lines>
//
// Numbers are written with 17 significant digits so parsing restores them exactly.
struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::string> columns;
  std::vector<std::string> units;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> footer;

  void add_row(std::vector<double> row);
  void write(std::ostream& out) const;
  std::string to_string() const;
  static ResultTable parse(std::istream& in);
};

std::string format_real(double v);
double parse_real(const std::string& text);

}  // namespace weaktime::cli
