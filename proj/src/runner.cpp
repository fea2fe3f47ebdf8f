#include "sn/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "sn/csv.hpp"
#include "sn/errors.hpp"
#include "sn/kernels.hpp"
#include "sn/materials.hpp"
#include "sn/radial.hpp"
#include "sn/spectral.hpp"
#include "sn/trap.hpp"
#include "sn/units.hpp"

namespace sn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------- parameters

class ParamReader {
 public:
  ParamReader(const std::map<std::string, std::string>& params,
              std::vector<std::string> allowed)
      : params_(params), allowed_(allowed.begin(), allowed.end()) {}

  std::vector<std::string> unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : params_)
      if (!allowed_.count(k)) out.push_back(k);
    return out;
  }

  bool has(const std::string& key) const { return params_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end())
      throw ValidationError("missing required parameter '" + key + "'");
    return it->second;
  }

  double parse_double(const std::string& key, const std::string& text) const {
    try {
      std::size_t pos = 0;
      const double x = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return x;
    } catch (const std::exception&) {
      throw ValidationError("parameter '" + key + "': cannot parse number '" +
                            text + "'");
    }
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : parse_double(key, it->second);
  }

  double require_double(const std::string& key) const {
    return parse_double(key, require_string(key));
  }

  int get_int(const std::string& key, int fallback) const {
    const double x = get_double(key, fallback);
    if (x != std::floor(x))
      throw ValidationError("parameter '" + key + "' must be an integer");
    return static_cast<int>(x);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ValidationError("parameter '" + key + "' must be true/false");
  }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    auto it = params_.find(key);
    if (it == params_.end()) return out;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_double(key, cell));
    return out;
  }

 private:
  const std::map<std::string, std::string>& params_;
  std::set<std::string> allowed_;
};

const std::vector<std::string>& allowed_keys(const std::string& scenario) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"materials", {"materials_file"}},
      {"kernel",
       {"variant", "material", "mass_u", "dmax_m", "points", "density_file",
        "materials_file"}},
      {"spectrum",
       {"material", "mass_u", "omega0_hz", "nmax", "dn", "temperature_mk",
        "max_n", "jobs", "materials_file"}},
      {"trap",
       {"material", "mass_u", "omega0_hz", "kernel", "squeeze", "displace_m",
        "dt_s", "t_end_s", "grid_n", "snapshot_stride", "nonlinearity",
        "density_file", "materials_file", "jobs"}},
      {"dispersion",
       {"mass_u", "width_um", "t_end_s", "dt_s", "grid_n", "rmax_factor",
        "no_gravity", "metrics_stride", "snapshot_stride", "jobs"}},
      {"replay", {"manifest"}},
  };
  auto it = table.find(scenario);
  if (it == table.end())
    throw ValidationError("unknown scenario '" + scenario +
                          "'; expected materials|kernel|spectrum|trap|dispersion|replay");
  return it->second;
}

MaterialCatalog catalog_for(const ParamReader& p) {
  MaterialCatalog cat;
  if (p.has("materials_file")) cat.load_file(p.get_string("materials_file", ""));
  return cat;
}

RadialDensityTable load_density_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open density table: " + path.string());
  RadialDensityTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double r, rho;
    if (ss >> r >> rho) {
      t.r.push_back(r);
      t.rho.push_back(rho);
    } else if (!line.empty() && line.find_first_not_of(" \t\r\n") != std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected two columns (r_m, rho_kg_m3)");
    }
  }
  if (t.r.size() < 4)
    throw ValidationError("density table needs at least 4 rows: " + path.string());
  return t;
}

// --------------------------------------------------------------- kernel setup

SelfGravityKernel build_kernel(const std::string& variant, double mass_kg,
                               const std::optional<MaterialRecord>& material,
                               const std::optional<std::string>& density_file) {
  if (variant == "delta") return SelfGravityKernel::delta(mass_kg);
  if (variant == "numeric") {
    if (!density_file)
      throw ValidationError("numeric kernel requires density_file");
    return SelfGravityKernel::numeric(load_density_table(*density_file), mass_kg);
  }
  if (!material)
    throw ValidationError("kernel variant '" + variant + "' requires a material");
  const double radius = material->sphere_radius_m(mass_kg);
  if (variant == "sphere")
    return SelfGravityKernel::sphere({mass_kg, radius});
  CrystalKernelParams cp{mass_kg, radius, material->m_atom_kg(), material->sigma_m()};
  if (variant == "crystal") return SelfGravityKernel::crystal(cp);
  if (variant == "narrow") return SelfGravityKernel::narrow(cp);
  throw ValidationError("unknown kernel variant '" + variant +
                        "'; expected delta|sphere|crystal|narrow|numeric");
}

// ------------------------------------------------------------------ scenarios

struct ExecContext {
  std::filesystem::path dir;
  RunManifest manifest;
  long steps = 0;
  std::vector<Diagnostic> diagnostics;
  std::mutex mutex;  // guards manifest/diagnostics during parallel scans

  void add_output(const std::filesystem::path& file) {
    OutputRecord rec;
    rec.file = std::filesystem::relative(file, dir).string();
    rec.crc32 = crc32_hex(crc32_file(file));
    std::lock_guard<std::mutex> lock(mutex);
    manifest.outputs.push_back(rec);
  }

  void add_output(const std::filesystem::path& file, long rows) {
    OutputRecord rec;
    rec.file = std::filesystem::relative(file, dir).string();
    rec.crc32 = crc32_hex(crc32_file(file));
    rec.rows = rows;
    std::lock_guard<std::mutex> lock(mutex);
    manifest.outputs.push_back(rec);
  }

  void warn(const std::string& code, const std::string& message) {
    std::lock_guard<std::mutex> lock(mutex);
    diagnostics.push_back({Diagnostic::Severity::warning, code, message});
  }
};

void echo(ExecContext& ctx, const std::string& key, const std::string& value) {
  ctx.manifest.config[key] = value;
}
void echo_num(ExecContext& ctx, const std::string& key, double value) {
  ctx.manifest.config[key] = format_number(value);
}
void echo_int(ExecContext& ctx, const std::string& key, long value) {
  ctx.manifest.config[key] = std::to_string(value);
}
void note_derived(ExecContext& ctx, const std::string& key, double value) {
  ctx.manifest.derived[key] = format_number(value);
}

void run_materials(const ParamReader& p, ExecContext& ctx) {
  const MaterialCatalog cat = catalog_for(p);
  if (p.has("materials_file"))
    echo(ctx, "materials_file", p.get_string("materials_file", ""));
  const auto path = ctx.dir / "materials.csv";
  CsvWriter csv(path, {"name", "m_atom_u", "density_g_cm3", "sigma_pm",
                       "omega_sn_sq_s2"});
  for (const auto& rec : cat.records()) {
    const double w = omega_sn(rec.m_atom_kg(), rec.sigma_m());
    csv.row_raw({rec.name, format_number(rec.m_atom_u),
                 format_number(rec.density_g_cm3), format_number(rec.sigma_pm),
                 format_number(w * w)});
  }
  csv.close();
  ctx.add_output(path, csv.rows());
}

void run_kernel(const ParamReader& p, ExecContext& ctx) {
  const std::string variant = p.get_string("variant", "sphere");
  const double mass_u = p.require_double("mass_u");
  if (!(mass_u > 0.0)) throw ValidationError("mass_u must be positive");
  const double mass_kg = u_to_kg(mass_u);

  std::optional<MaterialRecord> material;
  if (p.has("material")) material = catalog_for(p).lookup(p.get_string("material", ""));
  std::optional<std::string> density_file;
  if (p.has("density_file")) density_file = p.get_string("density_file", "");

  const SelfGravityKernel kernel = build_kernel(variant, mass_kg, material, density_file);
  for (const auto& w : kernel.construction_warnings()) ctx.warn("kernel-validity", w);

  double dmax_default = 0.0;
  switch (kernel.variant()) {
    case SelfGravityKernel::Variant::sphere:
      dmax_default = 4.0 * kernel.structure_scale();
      break;
    case SelfGravityKernel::Variant::crystal:
      dmax_default = material ? material->sphere_radius_m(mass_kg) : 0.0;
      break;
    case SelfGravityKernel::Variant::narrow:
      dmax_default = 3.0 * kernel.structure_scale();
      break;
    case SelfGravityKernel::Variant::numeric:
      dmax_default = 2.0 * kernel.structure_scale();
      break;
    case SelfGravityKernel::Variant::delta:
      break;
  }
  const double dmax = p.get_double("dmax_m", dmax_default);
  if (!(dmax > 0.0))
    throw ValidationError("dmax_m must be positive (required for the delta kernel)");
  const int points = p.get_int("points", 512);
  if (points < 2) throw ValidationError("points must be >= 2");

  echo(ctx, "variant", variant);
  echo_num(ctx, "mass_u", mass_u);
  if (material) echo(ctx, "material", material->name);
  if (density_file) echo(ctx, "density_file", *density_file);
  echo_num(ctx, "dmax_m", dmax);
  echo_int(ctx, "points", points);

  if (auto w = kernel.extent_warning(dmax)) ctx.warn("kernel-validity", *w);

  const auto path = ctx.dir / "kernel.csv";
  CsvWriter csv(path, {"d_m", "i_kg2_per_m"});
  const int start = kernel.finite_at_zero() ? 0 : 1;
  for (int i = start; i < points; ++i) {
    const double d = dmax * static_cast<double>(i) / (points - 1);
    csv.row({d, kernel(d)});
  }
  csv.close();
  ctx.add_output(path, csv.rows());
  ctx.steps = csv.rows();
}

void run_spectrum(const ParamReader& p, ExecContext& ctx, int jobs) {
  const MaterialCatalog cat = catalog_for(p);
  const MaterialRecord material = cat.lookup(p.require_string("material"));
  const double mass_u = p.require_double("mass_u");
  const double omega0_hz = p.require_double("omega0_hz");
  if (!(mass_u > 0.0) || !(omega0_hz > 0.0))
    throw ValidationError("mass_u and omega0_hz must be positive");
  const int nmax = p.get_int("nmax", 50);
  const int dn = p.get_int("dn", 1);
  const double temperature_mk = p.get_double("temperature_mk", 100.0);
  if (temperature_mk < 0.0) throw ValidationError("temperature_mk must be >= 0");
  const int max_n = p.get_int("max_n", std::max(200, nmax));

  echo(ctx, "material", material.name);
  echo_num(ctx, "mass_u", mass_u);
  echo_num(ctx, "omega0_hz", omega0_hz);
  echo_int(ctx, "nmax", nmax);
  echo_int(ctx, "dn", dn);
  echo_num(ctx, "temperature_mk", temperature_mk);
  echo_int(ctx, "max_n", max_n);

  const double omega0 = kTwoPi * omega0_hz;
  const SpectralParams sp = SpectralParams::make(u_to_kg(mass_u), omega0, material);
  note_derived(ctx, "alpha", sp.alpha);
  note_derived(ctx, "omega_sn_rad_s",
               omega_sn(material.m_atom_kg(), material.sigma_m()));

  HermiteWorkspace ws(max_n);
  const auto lines =
      transition_spectrum(ws, sp, nmax, dn, mk_to_k(temperature_mk), jobs);

  const auto path = ctx.dir / "spectrum.csv";
  CsvWriter csv(path, {"n", "omega_unperturbed_rad_s", "shift_rad_s", "weight"});
  for (const auto& line : lines)
    csv.row_raw({std::to_string(line.n_lower),
                 format_number(line.omega_unperturbed),
                 format_number(line.omega_shift), format_number(line.weight)});
  csv.close();
  ctx.add_output(path, csv.rows());
  ctx.steps = csv.rows();
}

void write_trap_outputs(const TrapRun& run, const std::filesystem::path& dir,
                        ExecContext& ctx) {
  {
    CsvWriter csv(dir / "moments.csv",
                  {"t_s", "mean_x_m", "mean_x2_m2", "variance_m2", "norm",
                   "energy_j"});
    for (std::size_t i = 0; i < run.moments.t.size(); ++i)
      csv.row({run.moments.t[i], run.moments.mean_x[i], run.moments.mean_x2[i],
               run.moments.variance[i], run.moments.norm[i],
               run.moments.energy[i]});
    csv.close();
    ctx.add_output(dir / "moments.csv", csv.rows());
  }
  for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%06zu.csv", s);
    const auto path = dir / name;
    CsvWriter csv(path, {"x_m", "psi_sq_per_m", "re_psi", "im_psi"});
    const auto& st = run.snapshots[s];
    for (int i = 0; i < st.grid.n; ++i) {
      const auto a = st.amplitude[static_cast<std::size_t>(i)];
      csv.row({st.grid.x(i), std::norm(a), a.real(), a.imag()});
    }
    csv.close();
    ctx.add_output(path, csv.rows());
  }
}

void run_trap(const ParamReader& p, ExecContext& ctx, int jobs) {
  const MaterialCatalog cat = catalog_for(p);
  const MaterialRecord material = cat.lookup(p.require_string("material"));
  std::vector<double> masses_u = p.get_double_list("mass_u");
  if (masses_u.empty()) throw ValidationError("missing required parameter 'mass_u'");
  for (double m : masses_u)
    if (!(m > 0.0)) throw ValidationError("mass_u values must be positive");
  const double omega0_hz = p.require_double("omega0_hz");
  if (!(omega0_hz > 0.0)) throw ValidationError("omega0_hz must be positive");
  const double omega0 = kTwoPi * omega0_hz;

  const std::string variant = p.get_string("kernel", "narrow");
  const double squeeze = p.get_double("squeeze", 1.0);
  const double displace = p.get_double("displace_m", 0.0);
  const double dt = p.get_double("dt_s", 1e-3 / omega0);
  const double t_end = p.get_double("t_end_s", 10.0 * kTwoPi / omega0);
  const int grid_n = p.get_int("grid_n", 2048);
  const int stride = p.get_int("snapshot_stride", 200);
  const std::string nl = p.get_string("nonlinearity", "midpoint");
  if (nl != "midpoint" && nl != "pre_step")
    throw ValidationError("nonlinearity must be midpoint|pre_step");
  if (!(squeeze > 0.0)) throw ValidationError("squeeze must be positive");
  if (grid_n < 16) throw ValidationError("grid_n must be >= 16");

  std::ostringstream mass_echo;
  for (std::size_t i = 0; i < masses_u.size(); ++i) {
    if (i) mass_echo << ',';
    mass_echo << format_number(masses_u[i]);
  }
  echo(ctx, "material", material.name);
  echo(ctx, "mass_u", mass_echo.str());
  echo_num(ctx, "omega0_hz", omega0_hz);
  echo(ctx, "kernel", variant);
  echo_num(ctx, "squeeze", squeeze);
  echo_num(ctx, "displace_m", displace);
  echo_num(ctx, "dt_s", dt);
  echo_num(ctx, "t_end_s", t_end);
  echo_int(ctx, "grid_n", grid_n);
  echo_int(ctx, "snapshot_stride", stride);
  echo(ctx, "nonlinearity", nl);
  if (p.has("density_file")) echo(ctx, "density_file", p.get_string("density_file", ""));

  std::optional<std::string> density_file;
  if (p.has("density_file")) density_file = p.get_string("density_file", "");

  auto run_point = [&](std::size_t idx) {
    const double mass_kg = u_to_kg(masses_u[idx]);
    TrapEvolutionConfig cfg;
    cfg.mass = mass_kg;
    cfg.omega0 = omega0;
    cfg.kernel = build_kernel(variant, mass_kg, material, density_file);
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.snapshot_stride = stride;
    cfg.nonlinearity = (nl == "midpoint") ? NonlinearityUpdate::midpoint
                                          : NonlinearityUpdate::pre_step;
    const Grid1D grid = default_trap_grid(mass_kg, omega0, displace, squeeze, grid_n);
    const WavePacketState psi0 =
        make_trap_gaussian(grid, mass_kg, omega0, displace, squeeze);

    std::filesystem::path dir = ctx.dir;
    if (masses_u.size() > 1) {
      char sub[32];
      std::snprintf(sub, sizeof(sub), "point_%03zu", idx);
      dir /= sub;
      std::filesystem::create_directories(dir);
    }
    const TrapRun result = evolve_trap(psi0, cfg);
    for (const auto& w : result.warnings) ctx.warn("kernel-validity", w);
    write_trap_outputs(result, dir, ctx);
    {
      std::lock_guard<std::mutex> lock(ctx.mutex);
      ctx.steps += std::lround(t_end / dt);
    }
  };

  // Scan points are independent; cap concurrency at `jobs`.
  const unsigned pool_size = std::min<std::size_t>(
      masses_u.size(),
      jobs > 0 ? static_cast<unsigned>(jobs)
               : std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < pool_size; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= masses_u.size()) return;
        try {
          run_point(idx);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  // Deterministic manifest ordering regardless of scheduling.
  std::sort(ctx.manifest.outputs.begin(), ctx.manifest.outputs.end(),
            [](const OutputRecord& a, const OutputRecord& b) { return a.file < b.file; });
}

void run_dispersion(const ParamReader& p, ExecContext& ctx, int jobs) {
  std::vector<double> masses_u = p.get_double_list("mass_u");
  if (masses_u.empty()) throw ValidationError("missing required parameter 'mass_u'");
  for (double m : masses_u)
    if (!(m > 0.0)) throw ValidationError("mass_u values must be positive");

  const double width_um = p.get_double("width_um", 0.5);
  if (!(width_um > 0.0)) throw ValidationError("width_um must be positive");
  const int grid_n = p.get_int("grid_n", 4096);
  const double rmax_factor = p.get_double("rmax_factor", 6.0);
  const bool no_gravity = p.get_bool("no_gravity", false);
  if (grid_n < 64) throw ValidationError("grid_n must be >= 64");
  if (!(rmax_factor >= 2.0)) throw ValidationError("rmax_factor must be >= 2");

  // The time base is resolved once, from the first mass, so every scan point
  // shares sampling times and a replay reproduces all of them.
  const double r0 = um_to_m(width_um);
  const double tau0 = 2.0 * u_to_kg(masses_u[0]) * r0 * r0 / constants.hbar;
  const double t_end = p.get_double("t_end_s", 1.5 * tau0);
  const double dt = p.get_double("dt_s", t_end / 3000.0);
  if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end)
    throw ValidationError("dispersion: need 0 < dt_s <= t_end_s");
  const long steps = std::lround(t_end / dt);
  const int metrics_stride =
      p.get_int("metrics_stride", std::max<int>(1, static_cast<int>(steps / 200)));
  const int snapshot_stride = p.get_int("snapshot_stride", 0);

  std::ostringstream mass_echo;
  for (std::size_t i = 0; i < masses_u.size(); ++i) {
    if (i) mass_echo << ',';
    mass_echo << format_number(masses_u[i]);
  }
  echo(ctx, "mass_u", mass_echo.str());
  echo_num(ctx, "width_um", width_um);
  echo_int(ctx, "grid_n", grid_n);
  echo_num(ctx, "rmax_factor", rmax_factor);
  echo(ctx, "no_gravity", no_gravity ? "true" : "false");
  echo_num(ctx, "t_end_s", t_end);
  echo_num(ctx, "dt_s", dt);
  echo_int(ctx, "metrics_stride", metrics_stride);
  echo_int(ctx, "snapshot_stride", snapshot_stride);

  auto run_point = [&](std::size_t idx) {
    const double mass_kg = u_to_kg(masses_u[idx]);
    const double r_rms0 = std::sqrt(3.0) * r0;
    const double spread =
        r_rms0 * std::sqrt(1.0 + std::pow(constants.hbar * t_end /
                                          (2.0 * mass_kg * r0 * r0), 2));
    const double r_max = std::max(8.0 * r_rms0, rmax_factor * spread);

    RadialGrid grid{r_max, grid_n};
    RadialState psi0 = make_radial_gaussian(grid, mass_kg, r0);
    FreeEvolutionConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.metrics_stride = metrics_stride;
    cfg.snapshot_stride = snapshot_stride;
    cfg.gravity_on = !no_gravity;

    std::filesystem::path dir = ctx.dir;
    if (masses_u.size() > 1) {
      char sub[32];
      std::snprintf(sub, sizeof(sub), "point_%03zu", idx);
      dir /= sub;
      std::filesystem::create_directories(dir);
    }

    const FreeRun run = evolve_free(psi0, cfg);
    for (const auto& w : run.warnings) ctx.warn("absorber", w);

    {
      CsvWriter csv(dir / "metrics.csv",
                    {"t_s", "r_half_m", "r_rms_m", "peak_density_per_m"});
      for (std::size_t i = 0; i < run.t.size(); ++i)
        csv.row({run.t[i], run.r_half[i], run.r_rms[i], run.peak_density[i]});
      csv.close();
      ctx.add_output(dir / "metrics.csv", csv.rows());
    }
    for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
      char name[64];
      std::snprintf(name, sizeof(name), "snapshot_%06zu.csv", s);
      const auto path = dir / name;
      CsvWriter csv(path, {"r_m", "rho_radial_per_m"});
      const auto& st = run.snapshots[s];
      for (int i = 0; i < st.grid.n; ++i)
        csv.row({st.grid.r(i),
                 4.0 * std::numbers::pi * std::norm(st.u[static_cast<std::size_t>(i)])});
      csv.close();
      ctx.add_output(path, csv.rows());
    }
    {
      std::lock_guard<std::mutex> lock(ctx.mutex);
      ctx.steps += steps;
    }
  };

  const unsigned pool_size = std::min<std::size_t>(
      masses_u.size(),
      jobs > 0 ? static_cast<unsigned>(jobs)
               : std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < pool_size; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= masses_u.size()) return;
        try {
          run_point(idx);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  std::sort(ctx.manifest.outputs.begin(), ctx.manifest.outputs.end(),
            [](const OutputRecord& a, const OutputRecord& b) { return a.file < b.file; });
}

RunResult run_replay(const ParamReader& p, const ScenarioConfig& outer) {
  const RunManifest original = RunManifest::load(p.require_string("manifest"));
  ScenarioConfig replay_cfg;
  replay_cfg.scenario = original.scenario;
  replay_cfg.params = original.config;
  replay_cfg.output_dir = outer.output_dir;
  replay_cfg.jobs = outer.jobs;
  RunResult result = run(replay_cfg);

  std::vector<std::string> mismatches;
  std::map<std::string, std::string> fresh;
  for (const auto& o : result.manifest.outputs) fresh[o.file] = o.crc32;
  for (const auto& o : original.outputs) {
    auto it = fresh.find(o.file);
    if (it == fresh.end())
      mismatches.push_back(o.file + " (missing from replay)");
    else if (it->second != o.crc32)
      mismatches.push_back(o.file + " (crc " + o.crc32 + " -> " + it->second + ")");
  }
  if (!mismatches.empty()) {
    std::string msg = "replay outputs differ from the manifest:";
    for (const auto& m : mismatches) msg += " " + m + ";";
    throw NumericalError(msg);
  }
  return result;
}

}  // namespace

std::vector<Diagnostic> validate(const ScenarioConfig& cfg) {
  std::vector<Diagnostic> out;
  std::vector<std::string> allowed;
  try {
    allowed = allowed_keys(cfg.scenario);
  } catch (const ValidationError& e) {
    out.push_back({Diagnostic::Severity::error, "scenario", e.what()});
    return out;
  }
  ParamReader p(cfg.params, allowed);
  for (const auto& k : p.unknown_keys())
    out.push_back({Diagnostic::Severity::error, "unknown-key",
                   "unknown parameter '" + k + "' for scenario '" + cfg.scenario +
                       "' (no silent defaults for misspellings)"});

  auto check = [&](const char* code, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      out.push_back({Diagnostic::Severity::error, code, e.what()});
    }
  };

  if (cfg.scenario == "materials") {
    check("materials", [&] { catalog_for(p); });
  } else if (cfg.scenario == "kernel") {
    check("range", [&] {
      const double m = p.require_double("mass_u");
      if (!(m > 0.0)) throw ValidationError("mass_u must be positive");
    });
    check("kernel", [&] {
      const std::string variant = p.get_string("variant", "sphere");
      if (variant != "delta" && variant != "sphere" && variant != "crystal" &&
          variant != "narrow" && variant != "numeric")
        throw ValidationError("unknown kernel variant '" + variant + "'");
      if (variant != "delta" && variant != "numeric" && !p.has("material"))
        throw ValidationError("kernel variant '" + variant + "' requires a material");
      if (variant == "numeric" && !p.has("density_file"))
        throw ValidationError("numeric kernel requires density_file");
      if (variant == "delta" && !p.has("dmax_m"))
        throw ValidationError("delta kernel requires dmax_m");
    });
    check("materials", [&] {
      if (p.has("material")) catalog_for(p).lookup(p.get_string("material", ""));
    });
  } else if (cfg.scenario == "spectrum") {
    check("range", [&] {
      if (!(p.require_double("mass_u") > 0.0))
        throw ValidationError("mass_u must be positive");
      if (!(p.require_double("omega0_hz") > 0.0))
        throw ValidationError("omega0_hz must be positive");
      if (p.get_double("temperature_mk", 100.0) < 0.0)
        throw ValidationError("temperature_mk must be >= 0");
      const int nmax = p.get_int("nmax", 50);
      const int dn = p.get_int("dn", 1);
      if (dn < 1 || nmax < dn)
        throw ValidationError("need dn >= 1 and nmax >= dn");
      if (nmax > p.get_int("max_n", std::max(200, nmax)))
        throw ValidationError("nmax exceeds max_n");
    });
    check("materials", [&] { catalog_for(p).lookup(p.require_string("material")); });
  } else if (cfg.scenario == "trap") {
    check("range", [&] {
      const auto masses = p.get_double_list("mass_u");
      if (masses.empty()) throw ValidationError("missing required parameter 'mass_u'");
      for (double m : masses)
        if (!(m > 0.0)) throw ValidationError("mass_u must be positive");
      if (!(p.require_double("omega0_hz") > 0.0))
        throw ValidationError("omega0_hz must be positive");
      if (!(p.get_double("squeeze", 1.0) > 0.0))
        throw ValidationError("squeeze must be positive");
    });
    check("resolution-guard", [&] {
      const double omega0 = kTwoPi * p.require_double("omega0_hz");
      const double dt = p.get_double("dt_s", 1e-3 / omega0);
      if (dt * omega0 > 1e-2)
        throw ValidationError(
            "dt_s * omega0 = " + std::to_string(dt * omega0) +
            " exceeds the resolution guard 1e-2");
    });
    check("materials", [&] { catalog_for(p).lookup(p.require_string("material")); });
    // Applicability of the crystal-form kernels: the wave-function extent
    // must stay small compared to the particle radius R.
    try {
      const std::string variant = p.get_string("kernel", "narrow");
      if (variant == "crystal" || variant == "narrow") {
        const MaterialCatalog cat = catalog_for(p);
        const MaterialRecord material = cat.lookup(p.require_string("material"));
        const auto masses = p.get_double_list("mass_u");
        const double omega0 = kTwoPi * p.require_double("omega0_hz");
        const double squeeze = p.get_double("squeeze", 1.0);
        const double displace = p.get_double("displace_m", 0.0);
        for (double mu : masses) {
          const double mass_kg = u_to_kg(mu);
          const double width =
              std::sqrt(constants.hbar / (2.0 * mass_kg * omega0)) *
              std::max(squeeze, 1.0 / squeeze);
          const double extent = 6.0 * width + std::abs(displace);
          const double radius = material.sphere_radius_m(mass_kg);
          if (extent > radius)
            out.push_back(
                {Diagnostic::Severity::warning, "kernel-validity",
                 "predicted packet extent " + format_number(extent) +
                     " m exceeds the particle radius R = " + format_number(radius) +
                     " m at mass_u = " + format_number(mu) +
                     "; the crystal-form kernel assumes the wave-function "
                     "extent is small compared to R"});
        }
      }
    } catch (const std::exception&) {
      // the responsible error diagnostic was already recorded above
    }
  } else if (cfg.scenario == "dispersion") {
    check("range", [&] {
      const auto masses = p.get_double_list("mass_u");
      if (masses.empty()) throw ValidationError("missing required parameter 'mass_u'");
      for (double m : masses)
        if (!(m > 0.0)) throw ValidationError("mass_u must be positive");
      if (!(p.get_double("width_um", 0.5) > 0.0))
        throw ValidationError("width_um must be positive");
    });
  } else if (cfg.scenario == "replay") {
    check("replay", [&] { p.require_string("manifest"); });
  }
  return out;
}

RunResult run(const ScenarioConfig& cfg) {
  const auto diagnostics = validate(cfg);
  std::string errors;
  for (const auto& d : diagnostics)
    if (d.severity == Diagnostic::Severity::error)
      errors += (errors.empty() ? "" : "; ") + d.message;
  if (!errors.empty()) throw ValidationError(errors);

  ParamReader p(cfg.params, allowed_keys(cfg.scenario));
  if (cfg.scenario == "replay") return run_replay(p, cfg);

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec && !std::filesystem::is_directory(cfg.output_dir))
    throw IoError("cannot create output directory: " + cfg.output_dir.string());

  ExecContext ctx;
  ctx.dir = cfg.output_dir;
  ctx.manifest.scenario = cfg.scenario;
  for (const auto& d : diagnostics) ctx.diagnostics.push_back(d);

  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.scenario == "materials")
    run_materials(p, ctx);
  else if (cfg.scenario == "kernel")
    run_kernel(p, ctx);
  else if (cfg.scenario == "spectrum")
    run_spectrum(p, ctx, cfg.jobs);
  else if (cfg.scenario == "trap")
    run_trap(p, ctx, cfg.jobs);
  else if (cfg.scenario == "dispersion")
    run_dispersion(p, ctx, cfg.jobs);
  const auto t1 = std::chrono::steady_clock::now();

  ctx.manifest.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  ctx.manifest.steps = ctx.steps;
  ctx.manifest.write(cfg.output_dir / "manifest.json");

  RunResult result;
  result.manifest = ctx.manifest;
  result.diagnostics = ctx.diagnostics;
  return result;
}

}  // namespace sn
