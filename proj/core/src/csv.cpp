#include "pickbench/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>

#include "pickbench/error.hpp"

namespace pickbench::csv {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

namespace {

std::string where(std::string_view column, std::size_t row) {
  std::ostringstream os;
  os << "row " << row << ", column '" << column << "'";
  return os.str();
}

}  // namespace

double to_double(const std::string& field, std::string_view column, std::size_t row) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) {
    throw Error(ErrorCode::SchemaError, where(column, row) + ": not a number: '" + field + "'");
  }
  return v;
}

long to_int(const std::string& field, std::string_view column, std::size_t row) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(field.c_str(), &end, 10);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) {
    throw Error(ErrorCode::SchemaError, where(column, row) + ": not an integer: '" + field + "'");
  }
  return v;
}

Table read(std::istream& is, const std::vector<std::string>& expected_header) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::SchemaError, "missing header row");
  t.header = split(line);
  if (t.header != expected_header) {
    throw Error(ErrorCode::SchemaError, "unexpected header: '" + line + "', expected '" +
                                            join(expected_header) + "'");
  }
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto fields = split(line);
    if (fields.size() != expected_header.size()) {
      std::ostringstream os;
      os << "row " << row << ": expected " << expected_header.size() << " fields, got "
         << fields.size();
      throw Error(ErrorCode::SchemaError, os.str());
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(row);
  }
  return t;
}

}  // namespace pickbench::csv
