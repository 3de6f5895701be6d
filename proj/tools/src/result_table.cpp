#include "result_table.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace weaktime::cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_real: buffer too small");
  return std::string(buf, ptr);
}

double parse_real(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("parse_real: bad number '" + text + "'");
  }
  return v;
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("ResultTable: row width does not match columns");
  rows.push_back(std::move(row));
}

void ResultTable::write(std::ostream& out) const {
  for (const auto& h : header) out << "# " << h << '\n';
  for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
  out << '\n';
  if (!units.empty()) {
    out << "# units: ";
    for (std::size_t j = 0; j < units.size(); ++j) out << (j ? "," : "") << units[j];
    out << '\n';
  }
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_real(row[j]);
    out << '\n';
  }
  for (const auto& f : footer) out << "# " << f << '\n';
}

std::string ResultTable::to_string() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

}  // namespace

ResultTable ResultTable::parse(std::istream& in) {
  ResultTable t;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.size() > 2 ? line.substr(2) : "";
      if (have_columns && t.rows.empty() && t.units.empty() && body.rfind("units: ", 0) == 0) {
        t.units = split(body.substr(7));
      } else if (!have_columns) {
        t.header.push_back(body);
      } else {
        t.footer.push_back(body);
      }
      continue;
    }
    if (!have_columns) {
      t.columns = split(line);
      have_columns = true;
      continue;
    }
    if (!t.footer.empty()) throw std::runtime_error("ResultTable::parse: data row after footer");
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_real(cell));
    if (row.size() != t.columns.size()) throw std::runtime_error("ResultTable::parse: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace weaktime::cli
