// Command-line front end: materials | kernel | spectrum | trap | dispersion |
// replay. Every scenario writes CSV data plus a JSON manifest that is enough
// to re-run it bit-for-bit (see the replay subcommand).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sn/errors.hpp"
#include "sn/runner.hpp"

namespace {

struct CommonOpts {
  std::string output_dir = ".";
  int jobs = 0;
  bool validate_only = false;
};

// flag name (without dashes) -> parameter key, per subcommand
std::map<std::string, std::map<std::string, std::string>>& flag_tables() {
  static std::map<std::string, std::map<std::string, std::string>> tables;
  return tables;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Flat key = value file mirroring the subcommand's flags. Values already set
// on the command line win; unknown keys are an error.
void merge_config_file(const std::string& path, const std::string& subcommand,
                       std::map<std::string, std::string>& params) {
  std::ifstream in(path);
  if (!in) throw sn::IoError("cannot open config file: " + path);
  const auto& table = flag_tables()[subcommand];
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw sn::ValidationError(path + ":" + std::to_string(line_no) +
                                ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    const auto it = table.find(key);
    if (it == table.end())
      throw sn::ValidationError(path + ":" + std::to_string(line_no) +
                                ": unknown key '" + key + "' for subcommand '" +
                                subcommand + "'");
    params.emplace(it->second, value);  // flags override: keep existing
  }
}

void emit_error(const char* type, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cerr << j.dump() << std::endl;
}

int execute(const std::string& scenario, std::map<std::string, std::string> params,
            const std::string& config_path, const CommonOpts& common) {
  sn::ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.output_dir = common.output_dir;
  cfg.jobs = common.jobs;
  if (const char* env = std::getenv("SN_TOOLKIT_OUT")) cfg.output_dir = env;

  try {
    if (!config_path.empty()) merge_config_file(config_path, scenario, params);
  } catch (const sn::ValidationError& e) {
    emit_error("validation", e.what());
    return 2;
  } catch (const sn::IoError& e) {
    emit_error("io", e.what());
    return 4;
  }
  cfg.params = std::move(params);

  if (common.validate_only) {
    const auto diagnostics = sn::validate(cfg);
    bool has_error = false;
    for (const auto& d : diagnostics) {
      const bool err = d.severity == sn::Diagnostic::Severity::error;
      has_error = has_error || err;
      std::cout << (err ? "error" : "warning") << " [" << d.code << "] "
                << d.message << '\n';
    }
    if (diagnostics.empty()) std::cout << "configuration valid\n";
    return has_error ? 2 : 0;
  }

  try {
    const sn::RunResult result = sn::run(cfg);
    for (const auto& d : result.diagnostics)
      if (d.severity == sn::Diagnostic::Severity::warning)
        std::cerr << "warning [" << d.code << "] " << d.message << '\n';
    std::cout << "wrote " << result.manifest.outputs.size()
              << " output file(s) to " << cfg.output_dir.string() << '\n';
    return 0;
  } catch (const sn::ValidationError& e) {
    emit_error("validation", e.what());
    return 2;
  } catch (const sn::NumericalError& e) {
    emit_error("numerical", e.what());
    return 3;
  } catch (const sn::IoError& e) {
    emit_error("io", e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}

// Registers a flag that lands in the flat parameter map when given.
void map_option(CLI::App* cmd, std::map<std::string, std::string>& params,
                const std::string& flag, const std::string& key,
                const std::string& help) {
  cmd->fallthrough();  // lets -o/--jobs/--validate-only match the parent app
  cmd->add_option_function<std::string>(
      flag, [&params, key](const std::string& v) { params[key] = v; }, help);
  std::string bare = flag;
  while (!bare.empty() && bare.front() == '-') bare.erase(bare.begin());
  flag_tables()[cmd->get_name()][bare] = key;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Schroedinger-Newton toolkit: self-gravity kernels, trap spectra, "
      "trapped-packet dynamics and free dispersion"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("-o,--output-dir", common.output_dir,
                 "output directory (env SN_TOOLKIT_OUT overrides)");
  app.add_option("-j,--jobs", common.jobs,
                 "max concurrent scan points (0 = available cores)");
  app.add_flag("--validate-only", common.validate_only,
               "print diagnostics without executing");

  std::map<std::string, std::string> params;

  CLI::App* materials = app.add_subcommand(
      "materials", "print the material catalog with omega_sn^2 in s^-2");
  map_option(materials, params, "--materials", "materials_file",
             "extra materials, key-value text file");

  CLI::App* kernel = app.add_subcommand(
      "kernel", "tabulate the self-gravity kernel I(d) as CSV");
  map_option(kernel, params, "--variant", "variant",
             "delta|sphere|crystal|narrow|numeric (default sphere)");
  map_option(kernel, params, "--material", "material", "catalog material name");
  map_option(kernel, params, "--mass-u", "mass_u", "total mass, u");
  map_option(kernel, params, "--dmax-m", "dmax_m", "largest separation, m");
  map_option(kernel, params, "--points", "points", "table rows (default 512)");
  map_option(kernel, params, "--density-file", "density_file",
             "two-column radial density table (r_m, rho_kg_m3)");
  map_option(kernel, params, "--materials", "materials_file",
             "extra materials, key-value text file");

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "transition-frequency fine structure of a trapped particle");
  map_option(spectrum, params, "--material", "material", "catalog material name");
  map_option(spectrum, params, "--mass-u", "mass_u", "total mass, u");
  map_option(spectrum, params, "--omega0-hz", "omega0_hz",
             "trap frequency omega0 / 2pi, Hz");
  map_option(spectrum, params, "--nmax", "nmax",
             "highest quantum number (default 50)");
  map_option(spectrum, params, "--dn", "dn", "transition step (default 1)");
  map_option(spectrum, params, "--temperature-mk", "temperature_mk",
             "temperature, mK (default 100)");
  map_option(spectrum, params, "--max-n", "max_n",
             "Hermite workspace capacity (default max(200, nmax))");
  map_option(spectrum, params, "--materials", "materials_file",
             "extra materials, key-value text file");

  CLI::App* trap = app.add_subcommand(
      "trap", "nonlinear wave-packet evolution in the harmonic trap");
  map_option(trap, params, "--material", "material", "catalog material name");
  map_option(trap, params, "--mass-u", "mass_u",
             "total mass, u (comma-separated list runs a scan)");
  map_option(trap, params, "--omega0-hz", "omega0_hz",
             "trap frequency omega0 / 2pi, Hz");
  map_option(trap, params, "--kernel", "kernel",
             "narrow|crystal|sphere|numeric|delta (default narrow)");
  map_option(trap, params, "--squeeze", "squeeze",
             "initial width multiplier (default 1)");
  map_option(trap, params, "--displace-m", "displace_m",
             "initial displacement, m (default 0)");
  map_option(trap, params, "--dt", "dt_s",
             "time step, s (default 1e-3 / omega0)");
  map_option(trap, params, "--t-end", "t_end_s",
             "evolution time, s (default 10 trap periods)");
  map_option(trap, params, "--grid-n", "grid_n", "grid points (default 2048)");
  map_option(trap, params, "--snapshot-stride", "snapshot_stride",
             "steps between snapshots (default 200)");
  map_option(trap, params, "--nonlinearity", "nonlinearity",
             "midpoint|pre_step potential update (default midpoint)");
  map_option(trap, params, "--density-file", "density_file",
             "radial density table for the numeric kernel");
  map_option(trap, params, "--materials", "materials_file",
             "extra materials, key-value text file");

  CLI::App* dispersion = app.add_subcommand(
      "dispersion", "free 3D radial wave-packet dispersion and its inhibition");
  map_option(dispersion, params, "--mass-u", "mass_u",
             "particle mass, u (comma-separated list runs a scan)");
  map_option(dispersion, params, "--width-um", "width_um",
             "initial Gaussian width r0, um (default 0.5)");
  map_option(dispersion, params, "--t-end-s", "t_end_s",
             "evolution time, s (default 1.5x the free spreading time)");
  map_option(dispersion, params, "--dt", "dt_s",
             "time step, s (default t_end / 3000)");
  map_option(dispersion, params, "--grid-n", "grid_n",
             "radial grid points (default 4096)");
  map_option(dispersion, params, "--rmax-factor", "rmax_factor",
             "grid extent over the spread packet size (default 6)");
  map_option(dispersion, params, "--metrics-stride", "metrics_stride",
             "steps between metric samples (default ~steps/200)");
  map_option(dispersion, params, "--snapshot-stride", "snapshot_stride",
             "steps between snapshots (default 0: first and last only)");
  dispersion->add_flag_function(
      "--no-gravity",
      [&params](std::int64_t) { params["no_gravity"] = "true"; },
      "disable the self-interaction (reference run)");

  CLI::App* replay = app.add_subcommand(
      "replay", "re-run a manifest and verify bit-identical outputs");
  map_option(replay, params, "--manifest", "manifest", "manifest.json path");
  replay->add_option_function<std::string>(
      "manifest_path",
      [&params](const std::string& v) { params["manifest"] = v; },
      "manifest.json path (positional)");

  std::string config_path;
  for (CLI::App* cmd : {materials, kernel, spectrum, trap, dispersion, replay})
    cmd->add_option("--config", config_path,
                    "flat key = value file mirroring this subcommand's flags; "
                    "flags override file entries");

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* cmd : {materials, kernel, spectrum, trap, dispersion, replay})
    if (cmd->parsed()) return execute(cmd->get_name(), params, config_path, common);
  return 1;
}
