#include "cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "jampa/error.hpp"

namespace jampa::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::InvalidInput, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (in_row_ > 0) out_ << ',';
  ++in_row_;
}

CsvWriter& CsvWriter::field(double x) {
  separator();
  out_ << format_number(x);
  return *this;
}

CsvWriter& CsvWriter::field(long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view s) {
  separator();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw Error(ErrorKind::InvalidInput, "internal: CSV row has " + std::to_string(in_row_) + " fields, header has " +
                                             std::to_string(columns_));
  }
  out_ << '\n';
  in_row_ = 0;
}

CsvTable read_csv(std::istream& in, const std::vector<std::string>& columns, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) fail(source, line_no == 0 ? 1 : line_no, "missing header line");

  const auto header = split(line);
  std::vector<std::size_t> index;
  for (const auto& name : columns) {
    std::size_t found = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        if (found != header.size()) fail(source, line_no, "duplicate column \"" + name + "\"");
        found = i;
      }
    }
    if (found == header.size()) fail(source, line_no, "missing column \"" + name + "\"");
    index.push_back(found);
  }

  CsvTable table;
  table.columns = columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      fail(source, line_no,
           "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < index.size(); ++c) {
      const auto cell = cells[index[c]];
      double v = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
        fail(source, line_no, "column \"" + columns[c] + "\": not a finite number: \"" + std::string(cell) + "\"");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(line_no);
  }
  return table;
}

CsvTable read_csv_file(const std::string& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
  return read_csv(in, columns, path);
}

}  // namespace jampa::cli
