#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rmdp::csv {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

/// Quotes a field when it contains a comma, quote, or line break.
std::string quote(std::string_view field);

/// Writes one record terminated by "\n".
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads the next record; handles quoted fields spanning lines. Returns false
/// at end of input. `line` is advanced by the number of physical lines read.
bool read_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line);

double parse_number(const std::string& field, std::size_t line);
long parse_integer(const std::string& field, std::size_t line);

} // namespace rmdp::csv
