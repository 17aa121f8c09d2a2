#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace kanhar {

// Splits one line on `delim`; trims a trailing '\r'. Views point into `line`.
std::vector<std::string_view> split_fields(std::string_view line, char delim);

// strtod over the whole token; throws std::invalid_argument on garbage.
// Accepts both decimal and hexadecimal floating-point spellings.
double parse_double(std::string_view token, const std::string& context);

long parse_long(std::string_view token, const std::string& context);

// Streams a delimited file with a header row. Calls `on_row` with the fields
// of each data line (empty lines skipped). Returns the header fields. Throws
// a descriptive error naming the file when it cannot be opened. The second
// form hands the header to `on_header` before any row is delivered.
std::vector<std::string> for_each_row(
    const std::filesystem::path& path, char delim,
    const std::function<void(const std::vector<std::string_view>&)>& on_row);
std::vector<std::string> for_each_row(
    const std::filesystem::path& path, char delim,
    const std::function<void(const std::vector<std::string_view>&)>& on_row,
    const std::function<void(const std::vector<std::string>&)>& on_header);

}  // namespace kanhar
