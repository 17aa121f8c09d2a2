#include "kanhar/table.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace kanhar {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view token, const std::string& context) {
  const std::string buf(token);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str() || *end != '\0') {
    throw std::invalid_argument(context + ": cannot parse number '" + buf + "'");
  }
  return v;
}

long parse_long(std::string_view token, const std::string& context) {
  const std::string buf(token);
  char* end = nullptr;
  const long v = std::strtol(buf.c_str(), &end, 10);
  if (end == buf.c_str() || *end != '\0') {
    throw std::invalid_argument(context + ": cannot parse integer '" + buf + "'");
  }
  return v;
}

std::vector<std::string> for_each_row(
    const std::filesystem::path& path, char delim,
    const std::function<void(const std::vector<std::string_view>&)>& on_row,
    const std::function<void(const std::vector<std::string>&)>& on_header) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty file: " + path.string());
  }
  std::vector<std::string> header;
  for (auto f : split_fields(line, delim)) header.emplace_back(f);
  if (on_header) on_header(header);
  while (std::getline(in, line)) {
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    on_row(split_fields(line, delim));
  }
  return header;
}

std::vector<std::string> for_each_row(
    const std::filesystem::path& path, char delim,
    const std::function<void(const std::vector<std::string_view>&)>& on_row) {
  return for_each_row(path, delim, on_row, nullptr);
}

}  // namespace kanhar
