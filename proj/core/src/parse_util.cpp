#include "parse_util.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <stdexcept>

namespace tempis::detail {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_real(std::string_view text) {
  std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("expected a number, got nothing");
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("'" + t + "' is not a number");
  }
  return value;
}

std::vector<std::string> split_top_level(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  std::string last = trim(current);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

std::vector<double> parse_reals(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_top_level(text)) out.push_back(parse_real(item));
  return out;
}

Call parse_call(std::string_view text) {
  std::string t = trim(text);
  auto open = t.find('(');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != ')') throw std::invalid_argument("missing ')' in '" + t + "'");
  Call call;
  call.name = trim(std::string_view(t).substr(0, open));
  call.args = parse_reals(std::string_view(t).substr(open + 1, t.size() - open - 2));
  return call;
}

}  // namespace tempis::detail
