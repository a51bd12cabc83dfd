#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pickbench::csv {

/// Fixed-precision (9 significant digits) number formatting used by every
/// text export so files are byte-identical across runs.
std::string number(double v);

std::vector<std::string> split(std::string_view line);
std::string join(const std::vector<std::string>& fields);

double to_double(const std::string& field, std::string_view column, std::size_t row);
long to_int(const std::string& field, std::string_view column, std::size_t row);

/// Header-led table. Throws SchemaError when the header differs from `expected`.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based, header is line 1
};

Table read(std::istream& is, const std::vector<std::string>& expected_header);

}  // namespace pickbench::csv
