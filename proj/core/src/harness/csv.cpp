#include "tempis/harness/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace tempis::harness {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted field");
  return fields;
}

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }

double to_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument(fmt::format("bad real '{}'", s));
  return v;
}

std::optional<double> to_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_real(s);
}

}  // namespace

std::string format_row(const CsvRow& r) {
  return fmt::format("{},{},{},{},{},{},{}", quote_field(r.experiment_id), opt(r.beta), opt(r.init), opt(r.t_or_n),
                     quote_field(r.metric_name), format_real(r.value), opt(r.stderr_));
}

CsvRow parse_row(const std::string& line) {
  auto f = split_record(line);
  if (f.size() != 7) throw std::invalid_argument(fmt::format("expected 7 fields, got {}", f.size()));
  return {f[0], to_opt(f[1]), to_opt(f[2]), to_opt(f[3]), f[4], to_real(f[5]), to_opt(f[6])};
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("missing or unexpected CSV header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line));
  }
  return rows;
}

}  // namespace tempis::harness
