#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tempis::harness {

/// One row of the long-format result table:
/// experiment_id,beta,init,t_or_n,metric_name,value,stderr. Missing numbers are empty fields.
struct CsvRow {
  std::string experiment_id;
  std::optional<double> beta;
  std::optional<double> init;
  std::optional<double> t_or_n;
  std::string metric_name;
  double value = 0.0;
  std::optional<double> stderr_;

  bool operator==(const CsvRow&) const = default;
};

inline constexpr const char* kCsvHeader = "experiment_id,beta,init,t_or_n,metric_name,value,stderr";

/// 17 significant digits; inf, -inf and nan spelled out.
std::string format_real(double x);
/// Quotes a field when it holds a comma, quote or newline.
std::string quote_field(const std::string& s);
/// Splits one CSV record, honouring double quotes.
std::vector<std::string> split_record(const std::string& line);

std::string format_row(const CsvRow& row);
CsvRow parse_row(const std::string& line);

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
/// Reads a file written by write_csv; throws std::invalid_argument on a schema mismatch.
std::vector<CsvRow> read_csv(std::istream& in);

}  // namespace tempis::harness
