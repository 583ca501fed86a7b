#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refcast::csv {

// Splits one CSV line. Handles double-quoted fields with "" escapes; no
// multi-line fields (none of our formats need them).
std::vector<std::string> split_line(std::string_view line);

// Quotes a field only when it contains a comma, quote or whitespace edge.
std::string escape(std::string_view field);

// Locale-independent numeric parsing. Empty string -> nullopt (missing).
// Anything else that is not a full valid number throws refcast::DataError.
std::optional<double> parse_double(std::string_view field, const std::string& context);
std::optional<long long> parse_int(std::string_view field, const std::string& context);

// Shortest round-trip formatting (std::to_chars); "" for missing (NaN).
std::string format_double(double v);
// Fixed decimals, '.' separator.
std::string format_fixed(double v, int decimals);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const;  // -1 if absent
};

// Reads a whole CSV file with a header row. Skips blank lines.
Table read_file(const std::string& path);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace refcast::csv
