#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sn/errors.hpp"
#include "sn/hermite.hpp"

using namespace sn;

TEST_CASE("low-order values") {
  for (double x : {-3.0, -0.7, 0.0, 0.4, 2.0, 11.0}) {
    CHECK(hermite_h(0, x) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hermite_h(1, x) == doctest::Approx(2.0 * x).epsilon(1e-13));
  }
  CHECK(hermite_h(1, 2.0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(hermite_h(2, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("recurrence against the explicit series") {
  for (int n = 0; n <= 12; ++n) {
    for (double x : {-2.5, -1.0, 0.3, 1.9, 4.0}) {
      const double ref = oracle::hermite_series(n, x);
      CHECK(hermite_h(n, x) == doctest::Approx(ref).epsilon(1e-11));
    }
  }
}

TEST_CASE("log-scaled evaluation survives large n") {
  // representable but far beyond what an unscaled 2^n n! recurrence allows
  const LogValue v = hermite_h_log(200, 3.0);
  CHECK(v.sign != 0);
  CHECK(std::isfinite(v.log_abs));
  CHECK(v.log_abs > 400.0);
  CHECK(hermite_h(200, 3.0) == doctest::Approx(v.value()).epsilon(1e-11));

  // far enough out the plain value genuinely exceeds the double range
  const LogValue big = hermite_h_log(200, 40.0);
  CHECK(big.log_abs > 709.0);
  CHECK(std::isinf(hermite_h(200, 40.0)));

  // orthonormal form matches the plain recurrence (which carries no sqrt(pi))
  const LogValue h = hermite_orthonormal_log(40, 1.2);
  const double ref = oracle::hermite_normalized(40, 1.2) /
                     std::pow(std::numbers::pi, 0.25);
  CHECK(h.sign * std::exp(h.log_abs) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("oscillator eigenfunctions are bounded and normalised") {
  const auto rule = GaussHermiteRule::make(256);
  for (int n : {0, 1, 7, 60, 127}) {
    double norm = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const LogValue h = hermite_orthonormal_log(n, rule.node[i]);
      if (h.sign == 0) continue;
      norm += std::exp(rule.log_weight[i] + 2.0 * h.log_abs);
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-11));
  }
  // pointwise boundedness of psi_n
  for (int n : {0, 5, 200}) {
    for (double x : {0.0, 1.0, 10.0, 25.0}) {
      const LogValue psi = hermite_function_log(n, x);
      if (psi.sign != 0) CHECK(psi.log_abs < 0.0);
    }
  }
}

TEST_CASE("Gauss-Hermite rules reproduce Gaussian moments") {
  for (int m : {16, 64, 512}) {
    const auto rule = GaussHermiteRule::make(m);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    double s0 = 0.0, s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const double w = std::exp(rule.log_weight[i]);
      const double x2 = rule.node[i] * rule.node[i];
      s0 += w;
      s2 += w * x2;
      s4 += w * x2 * x2;
    }
    CHECK(s0 == doctest::Approx(sqrt_pi).epsilon(1e-13));
    CHECK(s2 == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-13));
    CHECK(s4 == doctest::Approx(0.75 * sqrt_pi).epsilon(1e-13));
  }
}

TEST_CASE("workspace bounds checking") {
  const HermiteWorkspace ws(200);
  CHECK(ws.max_n() == 200);
  CHECK(ws.hermite(2, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(ws.hermite(201, 0.0), ValidationError);
  CHECK_THROWS_AS(ws.hermite(-1, 0.0), ValidationError);
  CHECK(ws.rule_for(200).node.size() >= 401);
}
