#pragma once

// Small text helpers shared by the file formats: shortest round-trip number
// formatting, strict number parsing, and a minimal CSV reader/writer (no
// quoting; none of our fields contain commas).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace softclip {

/// Shortest decimal string that parses back to the same double.
/// Infinities are written as "inf" / "-inf".
std::string format_double(double x);

/// Parses a whole field as a double ("inf", "-inf" accepted). Throws FormatError.
double parse_double(std::string_view text);

std::uint64_t parse_u64(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

/// Splits on `sep`; with `sep == ' '` runs of whitespace count as one separator.
std::vector<std::string_view> split(std::string_view line, char sep);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws FormatError if absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a header row and data rows; every row must have the header's width.
CsvTable read_csv(std::istream& in);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace softclip
