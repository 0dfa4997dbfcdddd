#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace jampa::cli {

/// 12 significant digits; "nan" and "inf" spelled out.
std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& field(double x);
  CsvWriter& field(long long x);
  CsvWriter& field(int x) { return field(static_cast<long long>(x)); }
  CsvWriter& field(std::string_view s);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

/// Numeric table read from a CSV with a header line. Column order is free;
/// the requested columns must all be present.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // values in `columns` order
  std::vector<std::size_t> lines;         // 1-based source line of each row
};

/// Throws Error(InvalidInput) with "<source>:<line>:" diagnostics.
CsvTable read_csv(std::istream& in, const std::vector<std::string>& columns, const std::string& source);
CsvTable read_csv_file(const std::string& path, const std::vector<std::string>& columns);

}  // namespace jampa::cli
