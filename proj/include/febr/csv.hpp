#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace febr::csv {

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string join(const std::vector<std::string>& fields, char sep = ',');

/// Shortest round-trip representation of a double.
std::string fmt(double v);
/// `digits` significant digits, %g style.
std::string fmt(double v, int digits);

/// Strict numeric parsers; throw std::invalid_argument on trailing junk.
double to_double(std::string_view s);
long long to_int(std::string_view s);

std::ofstream open_out(const std::filesystem::path& path);
std::ifstream open_in(const std::filesystem::path& path);

/// Reads `path` line by line, tracking the 1-based line number for error messages.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);
  bool next(std::string& line);
  std::size_t line_number() const noexcept { return line_no_; }
  const std::string& file() const noexcept { return name_; }
  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::ifstream in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

}  // namespace febr::csv
