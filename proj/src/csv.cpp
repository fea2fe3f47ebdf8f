#include "sn/csv.hpp"

#include <zlib.h>

#include <cstdio>

#include "sn/errors.hpp"

namespace sn {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw IoError("cannot open output file: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_number(values[i]);
  }
  out_ << '\n';
  ++rows_;
}

void CsvWriter::row_raw(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  ++rows_;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("failed to flush output file: " + path_.string());
}

std::uint32_t crc32_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read back output file: " + path.string());
  uLong crc = ::crc32(0L, Z_NULL, 0);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(buf),
                  static_cast<uInt>(in.gcount()));
    if (!in) break;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace sn
