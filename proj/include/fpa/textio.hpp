#pragma once

#include <string>
#include <vector>

namespace fpa {

// Reads a whole text file into lines (universal newlines). Throws ParseError
// when the file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

std::string trim(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);

// Strict double parse of a whole trimmed token. Throws ParseError with the
// given context (typically "file:line") on failure.
double parse_double(const std::string& token, const std::string& context);

// Formats with 12 significant digits, locale-independent (dot decimal).
std::string format_g12(double x);

}  // namespace fpa
