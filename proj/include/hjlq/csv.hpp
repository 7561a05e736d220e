#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace hjlq {

/// Locale-independent decimal with 17 significant digits.
std::string format_double(double v);

/// Minimal CSV writer: header first, '\n' line endings, trailing newline.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::string_view s);
  CsvWriter& operator<<(const char* s) { return *this << std::string_view(s); }

  /// Terminates the current row.
  void end_row();

 private:
  void sep();

  std::ofstream out_;
  std::filesystem::path path_;
  bool row_started_ = false;
};

}  // namespace hjlq
