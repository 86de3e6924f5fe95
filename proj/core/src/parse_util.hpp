#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tempis::detail {

std::string trim(std::string_view s);

/// Splits "name(a, b, c)" into name and numeric arguments; a bare "name" has no
/// arguments. Throws std::invalid_argument on malformed input.
struct Call {
  std::string name;
  std::vector<double> args;
};
Call parse_call(std::string_view text);

/// Comma-separated list of reals.
std::vector<double> parse_reals(std::string_view text);
double parse_real(std::string_view text);

/// Splits on commas that are not nested inside parentheses.
std::vector<std::string> split_top_level(std::string_view text);

}  // namespace tempis::detail
