#include "tempis/functions.hpp"

#include <cmath>
#include <regex>
#include <stdexcept>

#include <fmt/core.h>

namespace tempis {

TestFunction::TestFunction(std::string name, std::function<double(double)> eval, std::vector<double> breakpoints)
    : name_(std::move(name)), eval_(std::move(eval)), breakpoints_(std::move(breakpoints)) {}

TestFunction TestFunction::indicator(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("indicator: need a < b");
  return {fmt::format("indicator({},{})", a, b), [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; },
          {a, b}};
}

TestFunction TestFunction::power(int k) {
  if (k < 0) throw std::invalid_argument("power: negative exponent");
  return {fmt::format("power({})", k), [k](double x) { return std::pow(x, k); }, {0.0}};
}

TestFunction TestFunction::log_abs() {
  return {"log_abs", [](double x) { return std::log(std::abs(x)); }, {0.0}};
}

TestFunction TestFunction::sqrt_abs() {
  return {"sqrt_abs", [](double x) { return std::sqrt(std::abs(x)); }, {0.0}};
}

TestFunction TestFunction::identity() {
  return {"identity", [](double x) { return x; }, {}};
}

TestFunction TestFunction::constant(double c) {
  return {fmt::format("constant({})", c), [c](double) { return c; }, {}};
}

TestFunction TestFunction::parse(const std::string& text) {
  static const std::regex number(R"(\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*)");
  static const std::regex indicator_re(R"(\s*indicator\(([^,]+),([^)]+)\)\s*)");
  static const std::regex power_re(R"(\s*power\(\s*(\d+)\s*\)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, indicator_re)) {
    std::smatch a, b;
    std::string sa = m[1], sb = m[2];
    if (!std::regex_match(sa, a, number) || !std::regex_match(sb, b, number))
      throw std::invalid_argument("bad indicator bounds in '" + text + "'");
    return indicator(std::stod(a[1]), std::stod(b[1]));
  }
  if (std::regex_match(text, m, power_re)) return power(std::stoi(m[1]));
  std::string t = std::regex_replace(text, std::regex(R"(^\s+|\s+$)"), "");
  if (t == "log_abs") return log_abs();
  if (t == "sqrt_abs") return sqrt_abs();
  if (t == "identity") return identity();
  throw std::invalid_argument("unknown test function '" + text + "'");
}

}  // namespace tempis
