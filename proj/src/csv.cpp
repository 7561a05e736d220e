#include "hjlq/csv.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace hjlq {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& h : header) *this << std::string_view(h);
  end_row();
}

void CsvWriter::sep() {
  if (row_started_) out_.put(',');
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  sep();
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out_.write(buf.data(), res.ptr - buf.data());
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  sep();
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  return *this;
}

void CsvWriter::end_row() {
  out_.put('\n');
  row_started_ = false;
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

}  // namespace hjlq
