#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace teleran::csv {

// Line-oriented reader for the plain comma-separated files used by the
// harness (no quoting). Errors carry the file name and line number.
class Reader {
 public:
  Reader(std::istream& in, std::string source_name);

  // Reads the first line and checks it against `columns` exactly.
  void expect_header(const std::vector<std::string>& columns);
  // Reads the header and returns its column names.
  std::vector<std::string> read_header();

  // Next non-empty data row, or nullopt at end of input.
  std::optional<std::vector<std::string>> next();

  std::size_t line_number() const { return line_; }
  [[noreturn]] void fail(const std::string& what) const;

  double to_double(const std::vector<std::string>& row, std::size_t col) const;
  std::uint64_t to_uint(const std::vector<std::string>& row, std::size_t col) const;

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
  std::size_t width_ = 0;
};

std::vector<std::string> split(std::string_view line, char sep = ',');

// Shortest round-trip formatting of a double.
std::string format_double(double v);

// Writes rows with a fixed column count. The header line is written on
// construction unless emit_header is false (for appending row blocks).
class Writer {
 public:
  Writer(std::ostream& out, const std::vector<std::string>& header, bool emit_header = true);

  Writer& field(std::string_view s);
  Writer& field(double v);
  Writer& field(std::int64_t v);
  Writer& field(std::uint64_t v);
  Writer& field(int v) { return field(static_cast<std::int64_t>(v)); }
  Writer& field(unsigned v) { return field(static_cast<std::uint64_t>(v)); }
  void end_row();

 private:
  std::ostream& out_;
  std::size_t width_;
  std::size_t col_ = 0;
};

}  // namespace teleran::csv
