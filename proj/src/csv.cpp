#include "softclip/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "softclip/error.hpp"

namespace softclip {

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return x;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError("not a nonnegative integer: '" + std::string(text) + "'");
  }
  return x;
}

std::string_view trim(std::string_view text) noexcept {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("missing CSV column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    for (auto f : split(line, ',')) fields.emplace_back(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw FormatError("CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields");
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw FormatError("empty CSV");
  return table;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

}  // namespace softclip
