#pragma once

// Minimal CSV dialect: comma separated, '.' decimal, mandatory header,
// no quoting. Parsing and formatting never depend on the C locale.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polariton::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

/// Throws ValidationError naming `where` on malformed input.
double parse_double(std::string_view text, const std::string& where);

/// Empty (after trimming) -> nullopt.
std::optional<double> parse_optional_double(std::string_view text, const std::string& where);

/// Shortest round-trip representation.
std::string format_double(double v);

/// `digits` significant digits, %g style.
std::string format_significant(double v, int digits);

/// Reads the header line and checks it matches `expected` exactly
/// (whitespace around names is ignored).
void expect_header(std::istream& in, const std::vector<std::string>& expected, const std::string& source);

/// Reads the next non-empty line; false at EOF. Strips a trailing '\r'.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

}  // namespace polariton::csv
