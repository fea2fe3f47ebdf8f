#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sn {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct OutputRecord {
  std::string file;  // relative to the manifest directory
  std::string crc32; // 8 hex digits
  long rows = 0;
};

// Everything needed to reproduce a run: the frozen constants, the fully
// resolved configuration, and a checksum per data file.
struct RunManifest {
  std::string scenario;
  std::map<std::string, std::string> config;   // resolved key -> value, echoed
  std::map<std::string, std::string> derived;  // informational, not re-run input
  std::vector<OutputRecord> outputs;
  double wall_seconds = 0.0;
  long steps = 0;

  void write(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

std::string crc32_hex(std::uint32_t crc);

}  // namespace sn
