#include "sn/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sn/constants.hpp"
#include "sn/csv.hpp"
#include "sn/errors.hpp"

namespace sn {

std::string crc32_hex(std::uint32_t crc) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(8) << crc;
  return os.str();
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["toolkit_version"] = kToolkitVersion;
  j["scenario"] = scenario;
  j["constants"] = {
      {"G_m3_kg_s2", format_number(constants.G)},
      {"hbar_J_s", format_number(constants.hbar)},
      {"amu_kg", format_number(constants.amu)},
      {"kB_J_K", format_number(constants.kB)},
  };
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  if (!derived.empty()) {
    nlohmann::ordered_json der = nlohmann::ordered_json::object();
    for (const auto& [k, v] : derived) der[k] = v;
    j["derived"] = der;
  }
  nlohmann::ordered_json outs = nlohmann::ordered_json::array();
  for (const auto& o : outputs)
    outs.push_back({{"file", o.file}, {"crc32", o.crc32}, {"rows", o.rows}});
  j["outputs"] = outs;
  j["run"] = {{"wall_seconds", wall_seconds}, {"steps", steps}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed to flush manifest: " + path.string());
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError("manifest parse failure: " + std::string(e.what()));
  }
  RunManifest m;
  m.scenario = j.at("scenario").get<std::string>();
  for (const auto& [k, v] : j.at("config").items())
    m.config[k] = v.get<std::string>();
  if (j.contains("outputs")) {
    for (const auto& o : j["outputs"]) {
      OutputRecord rec;
      rec.file = o.at("file").get<std::string>();
      rec.crc32 = o.at("crc32").get<std::string>();
      rec.rows = o.value("rows", 0L);
      m.outputs.push_back(rec);
    }
  }
  return m;
}

}  // namespace sn
