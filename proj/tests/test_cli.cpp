#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sn/errors.hpp"
#include "sn/runner.hpp"

using namespace sn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("sn_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_error(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code && d.severity == Diagnostic::Severity::error) return true;
  return false;
}

bool has_warning(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code && d.severity == Diagnostic::Severity::warning) return true;
  return false;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("validation diagnostics") {
  SUBCASE("unknown keys are rejected, not defaulted") {
    ScenarioConfig cfg;
    cfg.scenario = "spectrum";
    cfg.params = {{"material", "osmium"}, {"mass_u", "1e14"},
                  {"omega0_hz", "10"}, {"temperture_mk", "100"}};
    CHECK(has_error(validate(cfg), "unknown-key"));
    CHECK_THROWS_AS(run(cfg), ValidationError);
  }
  SUBCASE("resolution guard diagnostic") {
    ScenarioConfig cfg;
    cfg.scenario = "trap";
    cfg.params = {{"material", "osmium"}, {"mass_u", "1e14"},
                  {"omega0_hz", "0.159154943"}, {"dt_s", "0.5"}};
    CHECK(has_error(validate(cfg), "resolution-guard"));
  }
  SUBCASE("negative mass range diagnostic") {
    ScenarioConfig cfg;
    cfg.scenario = "dispersion";
    cfg.params = {{"mass_u", "-1e10"}};
    CHECK(has_error(validate(cfg), "range"));
  }
  SUBCASE("crystal kernel applicability warning") {
    // a tiny mass makes the ground-state width dwarf the particle radius
    ScenarioConfig cfg;
    cfg.scenario = "trap";
    cfg.params = {{"material", "osmium"}, {"mass_u", "1e6"},
                  {"omega0_hz", "1.0"}, {"kernel", "crystal"}};
    CHECK(has_warning(validate(cfg), "kernel-validity"));
  }
  SUBCASE("unknown material lists the catalog") {
    ScenarioConfig cfg;
    cfg.scenario = "spectrum";
    cfg.params = {{"material", "Unobtainium"}, {"mass_u", "1e14"},
                  {"omega0_hz", "10"}};
    const auto ds = validate(cfg);
    CHECK(has_error(ds, "materials"));
    bool found = false;
    for (const auto& d : ds)
      if (d.message.find("Osmium") != std::string::npos) found = true;
    CHECK(found);
  }
}

TEST_CASE("materials scenario emits the catalog") {
  const auto dir = fresh_dir("materials");
  ScenarioConfig cfg;
  cfg.scenario = "materials";
  cfg.output_dir = dir;
  const RunResult res = run(cfg);
  REQUIRE(res.manifest.outputs.size() == 1);
  CHECK(res.manifest.outputs[0].rows == 4);
  const std::string body = slurp(dir / "materials.csv");
  CHECK(body.find("Osmium") != std::string::npos);
  CHECK(body.find("name,m_atom_u,density_g_cm3,sigma_pm,omega_sn_sq_s2") !=
        std::string::npos);
}

TEST_CASE("spectrum run, determinism, and replay") {
  const auto dir1 = fresh_dir("spec1");
  ScenarioConfig cfg;
  cfg.scenario = "spectrum";
  cfg.params = {{"material", "osmium"}, {"mass_u", "1e14"},
                {"omega0_hz", "10"}, {"nmax", "12"}};
  cfg.output_dir = dir1;
  const RunResult first = run(cfg);
  REQUIRE(first.manifest.outputs.size() == 1);
  CHECK(first.manifest.outputs[0].rows == 12);

  SUBCASE("identical config gives identical bytes") {
    const auto dir2 = fresh_dir("spec2");
    cfg.output_dir = dir2;
    run(cfg);
    CHECK(slurp(dir1 / "spectrum.csv") == slurp(dir2 / "spectrum.csv"));
  }
  SUBCASE("replay from the manifest alone") {
    const auto dir3 = fresh_dir("spec3");
    ScenarioConfig replay;
    replay.scenario = "replay";
    replay.params = {{"manifest", (dir1 / "manifest.json").string()}};
    replay.output_dir = dir3;
    const RunResult res = run(replay);
    CHECK(res.manifest.outputs.size() == 1);
    CHECK(slurp(dir1 / "spectrum.csv") == slurp(dir3 / "spectrum.csv"));
  }
  SUBCASE("tampered output is caught by replay") {
    const auto dir4 = fresh_dir("spec4");
    ScenarioConfig copy = cfg;
    copy.output_dir = dir4;
    run(copy);
    std::ofstream(dir4 / "spectrum.csv", std::ios::app) << "tamper\n";
    // rebuild a manifest pointing at the tampered file via replay of the
    // original; the fresh run cannot match the doctored checksum
    RunManifest m = RunManifest::load(dir4 / "manifest.json");
    m.outputs[0].crc32 = "00000000";
    m.write(dir4 / "manifest.json");
    ScenarioConfig replay;
    replay.scenario = "replay";
    replay.params = {{"manifest", (dir4 / "manifest.json").string()}};
    replay.output_dir = fresh_dir("spec5");
    CHECK_THROWS_AS(run(replay), NumericalError);
  }
}

TEST_CASE("kernel scenario writes a monotone table") {
  const auto dir = fresh_dir("kernel");
  ScenarioConfig cfg;
  cfg.scenario = "kernel";
  cfg.params = {{"variant", "sphere"}, {"material", "osmium"},
                {"mass_u", "1e14"}, {"points", "64"}};
  cfg.output_dir = dir;
  const RunResult res = run(cfg);
  CHECK(res.manifest.outputs[0].rows == 64);
  const std::string body = slurp(dir / "kernel.csv");
  CHECK(body.find("d_m,i_kg2_per_m") == 0);
}

TEST_CASE("manifest carries constants, config and checksums") {
  const auto dir = fresh_dir("manifest");
  ScenarioConfig cfg;
  cfg.scenario = "kernel";
  cfg.params = {{"variant", "narrow"}, {"material", "gold"},
                {"mass_u", "1e12"}, {"points", "16"}};
  cfg.output_dir = dir;
  run(cfg);
  const RunManifest m = RunManifest::load(dir / "manifest.json");
  CHECK(m.scenario == "kernel");
  CHECK(m.config.at("material") == "Gold");
  CHECK(m.config.at("points") == "16");
  CHECK(m.outputs.size() == 1);
  CHECK(m.outputs[0].crc32.size() == 8);
  const std::string raw = slurp(dir / "manifest.json");
  CHECK(raw.find("6.6739999999999994e-11") != std::string::npos);  // frozen G
}

TEST_CASE("cli binary end to end") {
  const auto dir = fresh_dir("bin");
  SUBCASE("success path exits 0") {
    CHECK(run_cli("materials -o " + (dir / "ok").string()) == 0);
  }
  SUBCASE("validation failures exit 2") {
    CHECK(run_cli("spectrum --material osmium --mass-u -5 --omega0-hz 10 -o " +
                  (dir / "bad").string()) == 2);
    CHECK(run_cli("spectrum --material nope --mass-u 1e14 --omega0-hz 10 -o " +
                  (dir / "bad2").string()) == 2);
  }
  SUBCASE("io failures exit 4") {
    CHECK(run_cli("replay " + (dir / "missing_manifest.json").string()) == 4);
  }
  SUBCASE("validate-only reports without executing") {
    CHECK(run_cli("--validate-only spectrum --material osmium --mass-u 1e14 "
                  "--omega0-hz 10 -o " + (dir / "vo").string()) == 0);
    CHECK(!fs::exists(dir / "vo" / "spectrum.csv"));
  }
  SUBCASE("env override directs the output") {
    const auto env_dir = dir / "via_env";
    const std::string cmd = "SN_TOOLKIT_OUT=" + env_dir.string() + " " +
                            std::string(SN_CLI_PATH) +
                            " materials -o /nonexistent_ignored > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(env_dir / "materials.csv"));
  }
}

TEST_CASE("numeric kernel from a two-column density file") {
  const auto dir = fresh_dir("numkernel");
  const auto table = dir / "ball.density";
  {
    // uniform ball, 1e13 u in a radius consistent with the mass
    const double mass = 1.6605e-14;  // kg
    const double radius = 1e-6;
    const double rho0 = 3.0 * mass / (4.0 * M_PI * std::pow(radius, 3));
    std::ofstream out(table);
    out.precision(12);
    for (int i = 0; i < 512; ++i)
      out << (radius * i / 511.0) << " " << rho0 << "\n";
  }
  ScenarioConfig cfg;
  cfg.scenario = "kernel";
  cfg.params = {{"variant", "numeric"}, {"mass_u", "1e13"},
                {"density_file", table.string()}, {"points", "32"}};
  cfg.output_dir = dir;
  const RunResult res = run(cfg);
  CHECK(res.manifest.outputs[0].rows == 32);

  SUBCASE("declared mass inconsistent with the table is rejected") {
    cfg.params["mass_u"] = "2e13";
    cfg.output_dir = fresh_dir("numkernel2");
    CHECK_THROWS_AS(run(cfg), ValidationError);
  }
}

TEST_CASE("mass scan writes one directory per point") {
  const auto dir = fresh_dir("scan");
  ScenarioConfig cfg;
  cfg.scenario = "trap";
  cfg.params = {{"material", "osmium"}, {"mass_u", "1e13,1e14"},
                {"omega0_hz", "0.159154943091895"}, {"t_end_s", "3.2"},
                {"grid_n", "256"}, {"snapshot_stride", "100000"},
                {"dt_s", "0.01"}};
  cfg.output_dir = dir;
  cfg.jobs = 2;
  const RunResult res = run(cfg);
  CHECK(fs::exists(dir / "point_000" / "moments.csv"));
  CHECK(fs::exists(dir / "point_001" / "moments.csv"));
  // manifest ordering is lexicographic regardless of thread scheduling
  for (std::size_t i = 1; i < res.manifest.outputs.size(); ++i)
    CHECK(res.manifest.outputs[i - 1].file < res.manifest.outputs[i].file);
}

TEST_CASE("cli dispersion example: contraction mass gives non-monotone r_half") {
  const auto dir = fresh_dir("disp");
  ScenarioConfig cfg;
  cfg.scenario = "dispersion";
  cfg.params = {{"mass_u", "1e10"}, {"width_um", "0.5"}, {"grid_n", "2048"}};
  cfg.output_dir = dir;
  run(cfg);

  std::ifstream in(dir / "metrics.csv");
  std::string line;
  std::getline(in, line);  // header
  CHECK(line == "t_s,r_half_m,r_rms_m,peak_density_per_m");
  std::vector<double> r_half;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    r_half.push_back(std::stod(cell));
  }
  REQUIRE(r_half.size() > 50);
  double lowest = 1e300;
  bool descended = false, recovered = false;
  for (double rh : r_half) {
    if (rh < 0.8 * r_half.front()) descended = true;
    if (rh < lowest)
      lowest = rh;
    else if (descended && rh > 1.05 * lowest)
      recovered = true;
  }
  CHECK(descended);
  CHECK(recovered);
}

TEST_CASE("cli binary replay round trip") {
  const auto dir = fresh_dir("binreplay");
  REQUIRE(run_cli("spectrum --material gold --mass-u 1e13 --omega0-hz 5 "
                  "--nmax 6 -o " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("replay " + (dir / "a" / "manifest.json").string() + " -o " +
                  (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "spectrum.csv") == slurp(dir / "b" / "spectrum.csv"));
}

TEST_CASE("config file mirrors flags, flags override") {
  const auto dir = fresh_dir("cfgfile");
  const auto cfg_path = dir / "run.cfg";
  std::ofstream(cfg_path) << "material = osmium\nmass-u = 1e14\n"
                          << "omega0-hz = 10\nnmax = 6\n";
  CHECK(run_cli("spectrum --config " + cfg_path.string() + " -o " +
                (dir / "a").string()) == 0);
  CHECK(run_cli("spectrum --config " + cfg_path.string() + " --nmax 4 -o " +
                (dir / "b").string()) == 0);
  // row counts prove which nmax won
  const std::string a = slurp(dir / "a" / "spectrum.csv");
  const std::string b = slurp(dir / "b" / "spectrum.csv");
  CHECK(std::count(a.begin(), a.end(), '\n') == 7);  // header + 6
  CHECK(std::count(b.begin(), b.end(), '\n') == 5);  // header + 4
}
