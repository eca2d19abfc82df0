#include "nucheck/text.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "nucheck/error.hpp"

namespace nucheck::text {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view s, std::string_view what) {
  const std::string str(trim(s));
  if (str.empty()) throw ParseError("empty number for " + std::string(what), 0, std::string(what));
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || errno == ERANGE) {
    throw ParseError("malformed number '" + str + "' for " + std::string(what), 0,
                     std::string(what));
  }
  return v;
}

int parse_int(std::string_view s, std::string_view what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParseError("expected an integer for " + std::string(what), 0, std::string(what));
  }
  return static_cast<int>(v);
}

}  // namespace nucheck::text
