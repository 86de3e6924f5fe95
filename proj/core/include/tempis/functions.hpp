#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tempis {

/// A named real test function f whose integral Pi(f) is estimated. Breakpoints
/// mark jumps, kinks or integrable singularities so quadrature can split there.
class TestFunction {
 public:
  TestFunction(std::string name, std::function<double(double)> eval, std::vector<double> breakpoints = {});

  static TestFunction indicator(double a, double b);  ///< 1 on [a, b]
  static TestFunction power(int k);                   ///< x^k
  static TestFunction log_abs();                      ///< log|x|
  static TestFunction sqrt_abs();                     ///< sqrt|x|
  static TestFunction identity();
  static TestFunction constant(double c);

  /// Parses the textual forms produced by name(): "indicator(a,b)", "power(k)",
  /// "log_abs", "sqrt_abs", "identity". Throws std::invalid_argument otherwise.
  static TestFunction parse(const std::string& text);

  double operator()(double x) const { return eval_(x); }
  const std::string& name() const { return name_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  std::string name_;
  std::function<double(double)> eval_;
  std::vector<double> breakpoints_;
};

}  // namespace tempis
