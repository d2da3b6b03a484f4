#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mgower::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends,
// embedded newlines inside quotes. A trailing empty line is ignored.
std::vector<Row> read(std::istream& in);
std::vector<Row> read(std::string_view text);

// Quotes a field only when it contains a delimiter, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

// Fixed 6-decimal rendering used for matrices and match tables.
std::string format_fixed6(double value);

// Shortest text that parses back to exactly `value`.
std::string format_roundtrip(double value);

}  // namespace mgower::csv
