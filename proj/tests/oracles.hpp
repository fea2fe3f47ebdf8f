// Test-side reference implementations, deliberately independent of the
// production code paths: plain-recurrence Hermite values, series/continued
// fraction erf, dense-trapezoid double quadrature for the level-shift
// functions, and a Monte-Carlo evaluation of the displacement integral.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

// erf by Maclaurin series (small x) or the Lentz continued fraction for
// erfc (large x); |error| ~ 1e-15 over the range used in tests.
inline double erf_reference(double x) {
  const double ax = std::abs(x);
  if (ax < 3.0) {
    // erf(x) = 2/sqrt(pi) sum_k (-1)^k x^{2k+1} / (k! (2k+1))
    double term = x;
    double sum = x;
    for (int k = 1; k < 200; ++k) {
      term *= -x * x / k;
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
  }
  if (ax > 6.5) return x > 0 ? 1.0 : -1.0;  // erfc < 1e-19
  // erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  // evaluated with the modified Lentz algorithm (a_k = k/2, b_k = x).
  double f = ax, c = ax, d = 0.0;
  for (int k = 1; k < 400; ++k) {
    const double a = 0.5 * k;
    d = ax + a * d;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = ax + a / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  const double erfc = std::exp(-ax * ax) / (std::sqrt(std::numbers::pi) * f);
  const double val = 1.0 - erfc;
  return x > 0 ? val : -val;
}

// Physicists' Hermite polynomial from the explicit sum
// H_n(x) = n! sum_k (-1)^k (2x)^{n-2k} / (k! (n-2k)!), usable for small n.
inline double hermite_series(int n, double x) {
  double sum = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    double term = std::tgamma(n + 1.0) /
                  (std::tgamma(k + 1.0) * std::tgamma(n - 2.0 * k + 1.0));
    term *= std::pow(2.0 * x, n - 2 * k);
    sum += (k % 2 == 0) ? term : -term;
  }
  return sum;
}

// H_n normalised by sqrt(2^n n!), by plain recurrence; fine for n <= ~40.
inline double hermite_normalized(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (n == 0) return 1.0;
  for (int k = 2; k <= n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * (k - 1) * h0;
    h0 = h1;
    h1 = h2;
  }
  double norm = 1.0;
  for (int k = 1; k <= n; ++k) norm *= 2.0 * k;
  return h1 / std::sqrt(norm);
}

// Dense-trapezoid evaluation of the displaced-overlap function P_n(z); the
// two Gaussian factors are folded into the exponents before multiplying so
// no intermediate overflows.
inline double p_n_bruteforce(int n, double z, int points = 20000) {
  const double b = 0.5 * std::abs(z) + std::sqrt(2.0 * n + 1.0) + 8.0;
  const double h = 2.0 * b / (points - 1);
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double xi = -b + i * h;
    const double ha = hermite_normalized(n, xi);
    const double hm = hermite_normalized(n, xi - z);
    const double hp = hermite_normalized(n, xi + z);
    const double e1 = std::exp(-2.0 * (xi - 0.5 * z) * (xi - 0.5 * z));
    const double e2 = std::exp(-2.0 * (xi + 0.5 * z) * (xi + 0.5 * z));
    const double f = e1 * ha * ha * hm * hm + e2 * ha * ha * hp * hp;
    sum += (i == 0 || i == points - 1) ? 0.5 * f : f;
  }
  return sum * h / std::sqrt(2.0 * std::numbers::pi);
}

// Brute-force nested trapezoid for the level-shift integral term.
inline double f_n_bruteforce(int n, double alpha, int outer_points = 3000,
                             int inner_points = 3000) {
  const double sqrt_2_over_pi = std::sqrt(2.0 / std::numbers::pi);
  const double z_support = 2.0 * std::sqrt(2.0 * n + 1.0) + 16.0;
  const double zeta_max = std::max(20.0, z_support) / alpha;
  const double h = zeta_max / (outer_points - 1);
  double sum = 0.0;
  for (int i = 0; i < outer_points; ++i) {
    const double zeta = i * h;
    double factor;
    if (zeta < 1e-6) {
      factor = sqrt_2_over_pi * (-2.0 * zeta * zeta / 3.0);
    } else {
      factor = erf_reference(std::numbers::sqrt2 * zeta) / (2.0 * zeta) -
               sqrt_2_over_pi;
    }
    const double z = alpha * zeta;
    const double q = std::exp(-0.5 * z * z) * p_n_bruteforce(n, z, inner_points);
    const double f = q * factor;
    sum += (i == 0 || i == outer_points - 1) ? 0.5 * f : f;
  }
  return alpha * alpha * alpha * sqrt_2_over_pi * sum * h;
}

// Monte-Carlo estimate of the self-displacement integral
// I(d) = M^2 E[ 1/|u - w - d e_z| ], u and w drawn from the radial density.
struct McResult {
  double value = 0.0;
  double std_error = 0.0;
};

inline McResult kernel_monte_carlo(const std::vector<double>& r,
                                   const std::vector<double>& rho, double d,
                                   long samples, std::uint64_t seed) {
  const std::size_t n = r.size();
  const double dr = r[1] - r[0];
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double f0 = 4.0 * std::numbers::pi * r[i - 1] * r[i - 1] * rho[i - 1];
    const double f1 = 4.0 * std::numbers::pi * r[i] * r[i] * rho[i];
    cum[i] = cum[i - 1] + 0.5 * dr * (f0 + f1);
  }
  const double mass = cum.back();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto sample_radius = [&]() {
    const double target = uni(rng) * mass;
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (cum[mid] < target ? lo : hi) = mid;
    }
    const double t = (target - cum[lo]) / (cum[hi] - cum[lo]);
    return r[lo] + t * dr;
  };
  auto sample_point = [&](double* v) {
    const double rr = sample_radius();
    const double z = 2.0 * uni(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * uni(rng);
    const double s = std::sqrt(1.0 - z * z);
    v[0] = rr * s * std::cos(phi);
    v[1] = rr * s * std::sin(phi);
    v[2] = rr * z;
  };

  double mean = 0.0, m2 = 0.0;
  for (long k = 0; k < samples; ++k) {
    double a[3], b[3];
    sample_point(a);
    sample_point(b);
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2] - d;
    const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
    const double delta = inv - mean;
    mean += delta / (k + 1);
    m2 += delta * (inv - mean);
  }
  McResult out;
  out.value = mass * mass * mean;
  out.std_error =
      mass * mass * std::sqrt(m2 / (static_cast<double>(samples) *
                                    (static_cast<double>(samples) - 1.0)));
  return out;
}

}  // namespace oracle
