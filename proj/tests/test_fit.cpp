#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "sn/errors.hpp"
#include "sn/fit.hpp"

using namespace sn;

namespace {

std::vector<double> time_axis(double t_end, double dt) {
  std::vector<double> t;
  for (double x = 0.0; x <= t_end + 0.5 * dt; x += dt) t.push_back(x);
  return t;
}

}  // namespace

TEST_CASE("clean synthetic sinusoid recovered to 1e-6") {
  const auto t = time_axis(20.0, 1e-3);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = std::sin(3.0 * t[i]);

  const SinusoidFit fit = extract_frequency(t, y, 3.1);
  CHECK(fit.converged);
  CHECK(!fit.high_residual);
  CHECK(fit.omega == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fit.offset == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("offset and phase recovered") {
  const auto t = time_axis(40.0, 2e-3);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    y[i] = 2.5 + 0.7 * std::cos(1.37 * t[i] - 0.9);
  const SinusoidFit fit = extract_frequency(t, y, 1.4);
  CHECK(fit.omega == doctest::Approx(1.37).epsilon(1e-8));
  CHECK(fit.amplitude == doctest::Approx(0.7).epsilon(1e-8));
  CHECK(fit.offset == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(fit.phase == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("two close tones flag a high residual") {
  const auto t = time_axis(30.0, 1e-3);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    y[i] = std::sin(3.0 * t[i]) + 0.8 * std::sin(3.45 * t[i]);
  const SinusoidFit fit = extract_frequency(t, y, 3.0);
  CHECK(fit.high_residual);
}

TEST_CASE("span precondition: at least five expected periods") {
  const auto t = time_axis(2.0, 1e-3);  // < 5 periods at omega = 3
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = std::sin(3.0 * t[i]);
  CHECK_THROWS_AS(extract_frequency(t, y, 3.0), ValidationError);
}
