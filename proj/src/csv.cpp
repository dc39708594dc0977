#include "teleran/csv.hpp"

#include <array>
#include <charconv>
#include <system_error>

#include "teleran/common.hpp"

namespace teleran::csv {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    std::string_view cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    out.emplace_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Reader::Reader(std::istream& in, std::string source_name) : in_(in), source_(std::move(source_name)) {}

void Reader::fail(const std::string& what) const {
  throw InputError(source_ + ":" + std::to_string(line_) + ": " + what);
}

std::vector<std::string> Reader::read_header() {
  std::string line;
  if (!std::getline(in_, line)) {
    line_ = 1;
    fail("empty file, expected a header row");
  }
  ++line_;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto cols = split(line);
  width_ = cols.size();
  return cols;
}

void Reader::expect_header(const std::vector<std::string>& columns) {
  const auto cols = read_header();
  if (cols != columns) {
    std::string expected;
    for (const auto& c : columns) expected += (expected.empty() ? "" : ",") + c;
    fail("unexpected header, expected `" + expected + "`");
  }
}

std::optional<std::vector<std::string>> Reader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.empty() || line == "\r") continue;
    auto row = split(line);
    if (width_ != 0 && row.size() != width_) {
      fail("expected " + std::to_string(width_) + " fields, found " + std::to_string(row.size()));
    }
    return row;
  }
  return std::nullopt;
}

double Reader::to_double(const std::vector<std::string>& row, std::size_t col) const {
  const std::string& s = row.at(col);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail("field " + std::to_string(col + 1) + " `" + s + "` is not a number");
  }
  return v;
}

std::uint64_t Reader::to_uint(const std::vector<std::string>& row, std::size_t col) const {
  const std::string& s = row.at(col);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail("field " + std::to_string(col + 1) + " `" + s + "` is not a non-negative integer");
  }
  return v;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

Writer::Writer(std::ostream& out, const std::vector<std::string>& header, bool emit_header)
    : out_(out), width_(header.size()) {
  if (!emit_header) return;
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

Writer& Writer::field(std::string_view s) {
  require(col_ < width_, "csv writer: too many fields in row");
  if (col_++) out_ << ',';
  out_ << s;
  return *this;
}

Writer& Writer::field(double v) { return field(std::string_view(format_double(v))); }
Writer& Writer::field(std::int64_t v) { return field(std::string_view(std::to_string(v))); }
Writer& Writer::field(std::uint64_t v) { return field(std::string_view(std::to_string(v))); }

void Writer::end_row() {
  require(col_ == width_, "csv writer: row has too few fields");
  out_ << '\n';
  col_ = 0;
}

}  // namespace teleran::csv
