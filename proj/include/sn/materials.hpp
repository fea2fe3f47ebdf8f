#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sn/constants.hpp"

namespace sn {

// One catalog row: the parameters that fix a material's self-gravity
// response (atomic mass, bulk density, localisation width of the atoms
// around their lattice sites).
struct MaterialRecord {
  std::string name;
  double m_atom_u = 0.0;       // atomic mass, u
  double density_g_cm3 = 0.0;  // bulk density, g/cm^3
  double sigma_pm = 0.0;       // atomic localisation width, pm

  double m_atom_kg() const { return u_to_kg(m_atom_u); }
  double density_kg_m3() const { return g_cm3_to_kg_m3(density_g_cm3); }
  double sigma_m() const { return pm_to_m(sigma_pm); }

  // Radius of a homogeneous sphere of this material with total mass M [kg].
  double sphere_radius_m(double total_mass_kg) const;
};

// Built-in rows plus user-supplied extensions loaded from a key-value file.
// Records are immutable once added; lookups are case-insensitive.
class MaterialCatalog {
 public:
  MaterialCatalog();  // four built-in materials

  const MaterialRecord& lookup(std::string_view name) const;
  bool contains(std::string_view name) const;
  const std::vector<MaterialRecord>& records() const { return records_; }

  // Extends the catalog from a plain-text file. Records are blocks of
  //   name = <id>
  //   m_atom_u = <x>
  //   density_g_cm3 = <x>
  //   sigma_pm = <x>
  // separated by blank lines; '#' starts a comment. Duplicate names
  // (including the built-ins) are rejected.
  void load_file(const std::filesystem::path& path);

  void add(MaterialRecord rec);

  std::string available_names() const;

 private:
  std::vector<MaterialRecord> records_;
};

}  // namespace sn
