#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace sn {

// Scientific notation with 17 significant digits: parses back to the same
// double, and identical runs produce identical bytes.
std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row_raw(const std::vector<std::string>& cells);
  long rows() const { return rows_; }
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  long rows_ = 0;
};

std::uint32_t crc32_file(const std::filesystem::path& path);

}  // namespace sn
