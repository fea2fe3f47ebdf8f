#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sn/errors.hpp"
#include "sn/kernels.hpp"
#include "sn/materials.hpp"

using namespace sn;

namespace {

RadialDensityTable uniform_ball(double mass, double radius, int n = 2001) {
  RadialDensityTable t;
  const double rho0 = 3.0 * mass / (4.0 * std::numbers::pi * std::pow(radius, 3));
  for (int i = 0; i < n; ++i) {
    t.r.push_back(radius * i / (n - 1.0));
    t.rho.push_back(rho0);
  }
  return t;
}

}  // namespace

TEST_CASE("homogeneous sphere kernel") {
  const SphereKernelParams p{2.0, 0.5};
  const double m2 = p.total_mass * p.total_mass;

  CHECK(i_sphere(0.0, p) == doctest::Approx(1.2 * m2 / p.radius).epsilon(1e-14));
  CHECK(i_sphere(10.0 * p.radius, p) ==
        doctest::Approx(m2 / (10.0 * p.radius)).epsilon(1e-14));

  SUBCASE("branch continuity at d = 2R") {
    const double inner = i_sphere(std::nextafter(2.0 * p.radius, 0.0), p);
    const double outer = i_sphere(2.0 * p.radius, p);
    CHECK(std::abs(inner - outer) / outer < 1e-12);
    CHECK(outer == doctest::Approx(m2 / (2.0 * p.radius)).epsilon(1e-14));
  }
  SUBCASE("non-increasing beyond the structure scale") {
    double prev = i_sphere(0.0, p);
    for (double d = 0.1 * p.radius; d < 6.0 * p.radius; d += 0.1 * p.radius) {
      const double cur = i_sphere(d, p);
      CHECK(cur <= prev * (1.0 + 1e-12));
      prev = cur;
    }
  }
}

TEST_CASE("crystalline kernel") {
  MaterialCatalog cat;
  const auto& os = cat.lookup("osmium");
  const double mass = u_to_kg(1e14);
  const CrystalKernelParams p{mass, os.sphere_radius_m(mass), os.m_atom_kg(),
                              os.sigma_m()};
  const double bulk = 1.2 * p.total_mass * p.total_mass / p.radius;

  SUBCASE("d -> 0 limit equals the quadratic form at d = 0") {
    CHECK(i_crystal(0.0, p) == doctest::Approx(i_narrow(0.0, p)).epsilon(1e-12));
    CHECK(i_crystal(1e-9 * p.sigma, p) ==
          doctest::Approx(i_narrow(0.0, p)).epsilon(1e-12));
  }
  SUBCASE("saturated regime d = 10 sigma") {
    const double d = 10.0 * p.sigma;
    const double expect = bulk + p.total_mass * p.atom_mass / d;
    CHECK(i_crystal(d, p) == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("d = sigma against the independent erf oracle") {
    const double erf_ref = oracle::erf_reference(1.0 / std::numbers::sqrt2);
    CHECK(erf_ref == doctest::Approx(0.6827).epsilon(1e-4));
    const double expect = bulk + p.total_mass * p.atom_mass / p.sigma * erf_ref;
    CHECK(i_crystal(p.sigma, p) == doctest::Approx(expect).epsilon(1e-13));
  }
  SUBCASE("ordering: no separation beats coincidence") {
    const double at0 = i_crystal(0.0, p);
    for (double d = 1e-3 * p.sigma; d < 50.0 * p.sigma; d *= 1.9)
      CHECK(i_crystal(d, p) <= at0);
  }
  SUBCASE("erf factor saturates far out") {
    const double d = 1e3 * p.sigma;
    const double site = i_crystal(d, p) - bulk;
    CHECK(site * d / (p.total_mass * p.atom_mass) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("narrow-regime quadratic kernel") {
  MaterialCatalog cat;
  const auto& os = cat.lookup("osmium");
  const double mass = u_to_kg(1e14);
  const CrystalKernelParams p{mass, os.sphere_radius_m(mass), os.m_atom_kg(),
                              os.sigma_m()};
  const double bulk = 1.2 * p.total_mass * p.total_mass / p.radius;
  const double site0 =
      2.0 * p.total_mass * p.atom_mass / (std::sqrt(2.0 * std::numbers::pi) * p.sigma);

  CHECK(i_narrow(0.0, p) == doctest::Approx(bulk + site0).epsilon(1e-14));
  CHECK(i_narrow(std::sqrt(6.0) * p.sigma, p) == doctest::Approx(bulk).epsilon(1e-9));

  SUBCASE("Taylor remainder against the full crystalline form") {
    const double d = 0.1 * p.sigma;
    const double rel = std::abs(i_narrow(d, p) - i_crystal(d, p)) / i_crystal(d, p);
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("self-gravity frequency") {
  MaterialCatalog cat;
  // the reference ratio column, read at omega0 = 1/s
  const struct {
    const char* name;
    double expect;
  } rows[] = {{"Silicon", 0.00246}, {"Tungsten", 0.128},
              {"Osmium", 0.264},    {"Gold", 0.0574}};
  for (const auto& row : rows) {
    const auto& m = cat.lookup(row.name);
    const double w = omega_sn(m.m_atom_kg(), m.sigma_m());
    CHECK(w * w == doctest::Approx(row.expect).epsilon(0.02));
  }
  SUBCASE("doubling sigma divides omega_sn^2 by 8") {
    const auto& os = cat.lookup("osmium");
    const double w1 = omega_sn(os.m_atom_kg(), os.sigma_m());
    const double w2 = omega_sn(os.m_atom_kg(), 2.0 * os.sigma_m());
    CHECK(w1 * w1 / (w2 * w2) == doctest::Approx(8.0).epsilon(1e-12));
  }
}

TEST_CASE("numeric kernel against the sphere closed form") {
  const double mass = 3.7, radius = 0.8;
  const NumericKernel k(uniform_ball(mass, radius), mass);
  const SphereKernelParams sp{mass, radius};
  for (double d : {0.0, radius, 3.0 * radius}) {
    CHECK(k(d) == doctest::Approx(i_sphere(d, sp)).epsilon(1e-5));
  }
  SUBCASE("grid refinement stability") {
    const NumericKernel fine(uniform_ball(mass, radius), mass, 8);
    for (double d : {0.0, radius, 3.0 * radius})
      CHECK(std::abs(k(d) - fine(d)) / fine(d) <= 1e-6);
  }
  SUBCASE("Newtonian tail") {
    const double d = 1e3 * radius;
    CHECK(d * k(d) / (mass * mass) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("continuity through the coincidence crossover") {
    const double h = radius / 2048.0;
    CHECK(k(0.4 * h) == doctest::Approx(k(0.6 * h)).epsilon(1e-6));
  }
}

TEST_CASE("numeric kernel point-mass limit") {
  RadialDensityTable t;
  const double w = 1e-3;
  const int n = 4001;
  for (int i = 0; i < n; ++i) {
    const double r = 8.0 * w * i / (n - 1.0);
    t.r.push_back(r);
    t.rho.push_back(std::exp(-r * r / (2.0 * w * w)));
  }
  const NumericKernel k(t);
  const double m = k.total_mass();
  for (double d : {0.5, 2.0})
    CHECK(k(d) == doctest::Approx(m * m / d).epsilon(1e-6));
}

TEST_CASE("numeric kernel two-shell density against Monte Carlo") {
  RadialDensityTable t;
  const int n = 3001;
  for (int i = 0; i < n; ++i) {
    const double r = i / (n - 1.0);
    t.r.push_back(r);
    t.rho.push_back(std::exp(-std::pow((r - 0.35) / 0.04, 2)) +
                    0.5 * std::exp(-std::pow((r - 0.8) / 0.05, 2)));
  }
  const NumericKernel k(t);
  for (double d : {0.0, 0.6}) {
    const auto mc = oracle::kernel_monte_carlo(t.r, t.rho, d, 10'000'000, 12345);
    CHECK(std::abs(k(d) - mc.value) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("numeric kernel rejects inconsistent or invalid tables") {
  const double mass = 3.7, radius = 0.8;
  SUBCASE("declared mass mismatch beyond 1e-6") {
    CHECK_THROWS_AS(NumericKernel(uniform_ball(mass, radius), mass * 1.001),
                    ValidationError);
  }
  SUBCASE("negative density") {
    auto t = uniform_ball(mass, radius);
    t.rho[17] = -1.0;
    CHECK_THROWS_AS(NumericKernel(t, mass), ValidationError);
  }
  SUBCASE("non-uniform grid") {
    auto t = uniform_ball(mass, radius);
    t.r[100] += 0.3 * (t.r[1] - t.r[0]);
    CHECK_THROWS_AS(NumericKernel(t, mass), ValidationError);
  }
}

TEST_CASE("kernel wrapper: magnitude symmetry and metadata") {
  MaterialCatalog cat;
  const auto& os = cat.lookup("osmium");
  const double mass = u_to_kg(1e14);
  const CrystalKernelParams cp{mass, os.sphere_radius_m(mass), os.m_atom_kg(),
                               os.sigma_m()};

  const auto kernels = {
      SelfGravityKernel::delta(mass),
      SelfGravityKernel::sphere({mass, cp.radius}),
      SelfGravityKernel::crystal(cp),
      SelfGravityKernel::narrow(cp),
  };
  for (const auto& k : kernels) {
    const double scale = k.structure_scale() > 0 ? k.structure_scale() : 1e-9;
    for (double d : {0.3 * scale, 2.0 * scale}) {
      CHECK(k(-d) == k(d));
      CHECK(std::isfinite(k(d)));
    }
  }

  SUBCASE("delta kernel Newtonian values and singular origin") {
    const auto k = SelfGravityKernel::delta(2.0);
    CHECK(k(0.5) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(!k.finite_at_zero());
    CHECK(std::isinf(k(0.0)));
  }
  SUBCASE("extent warning beyond the particle radius") {
    const auto k = SelfGravityKernel::crystal(cp);
    CHECK(!k.extent_warning(0.5 * cp.radius).has_value());
    CHECK(k.extent_warning(2.0 * cp.radius).has_value());
  }
  SUBCASE("sigma >= R recorded as construction warning") {
    CrystalKernelParams bad = cp;
    bad.sigma = 2.0 * bad.radius;
    const auto k = SelfGravityKernel::crystal(bad);
    CHECK(k.construction_warnings().size() == 1);
  }
}
