#include "sn/materials.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sn/errors.hpp"

namespace sn {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

double MaterialRecord::sphere_radius_m(double total_mass_kg) const {
  return std::cbrt(3.0 * total_mass_kg / (4.0 * std::numbers::pi * density_kg_m3()));
}

MaterialCatalog::MaterialCatalog() {
  records_ = {
      {"Silicon", 28.086, 2.329, 6.96},
      {"Tungsten", 183.84, 19.30, 3.48},
      {"Osmium", 190.23, 22.57, 2.77},
      {"Gold", 196.97, 19.32, 4.66},
  };
}

bool MaterialCatalog::contains(std::string_view name) const {
  const std::string key = to_lower(name);
  return std::any_of(records_.begin(), records_.end(),
                     [&](const MaterialRecord& r) { return to_lower(r.name) == key; });
}

const MaterialRecord& MaterialCatalog::lookup(std::string_view name) const {
  const std::string key = to_lower(name);
  for (const auto& r : records_) {
    if (to_lower(r.name) == key) return r;
  }
  throw UnknownMaterialError(std::string(name), available_names());
}

std::string MaterialCatalog::available_names() const {
  std::string out;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (i) out += ", ";
    out += records_[i].name;
  }
  return out;
}

void MaterialCatalog::add(MaterialRecord rec) {
  if (rec.name.empty()) throw ValidationError("material record without a name");
  if (contains(rec.name))
    throw ValidationError("duplicate material name '" + rec.name + "'");
  if (!(rec.m_atom_u > 0.0) || !(rec.density_g_cm3 > 0.0) || !(rec.sigma_pm > 0.0))
    throw ValidationError("material '" + rec.name +
                          "': m_atom_u, density_g_cm3 and sigma_pm must be positive");
  records_.push_back(std::move(rec));
}

void MaterialCatalog::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open materials file: " + path.string());

  MaterialRecord rec;
  bool open_record = false;
  int line_no = 0;

  auto flush = [&]() {
    if (!open_record) return;
    add(rec);
    rec = MaterialRecord{};
    open_record = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) {
      flush();
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    open_record = true;
    if (key == "name") {
      rec.name = value;
    } else {
      double x = 0.0;
      try {
        std::size_t pos = 0;
        x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": bad number '" + value + "'");
      }
      if (key == "m_atom_u")
        rec.m_atom_u = x;
      else if (key == "density_g_cm3")
        rec.density_g_cm3 = x;
      else if (key == "sigma_pm")
        rec.sigma_pm = x;
      else
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
    }
  }
  flush();
}

}  // namespace sn
