#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nucheck::text {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_number(double x);

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/// Strict full-string parse; throws ParseError naming `what` on failure.
double parse_double(std::string_view s, std::string_view what);
int parse_int(std::string_view s, std::string_view what);

}  // namespace nucheck::text
