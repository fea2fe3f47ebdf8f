#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sn {

// Composite trapezoid on a uniform grid.
double trapezoid(std::span<const double> f, double dx);

// Running trapezoid integral; out[i] = integral of f over [x0, x_i], out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx);

// Running integral using the interpolating parabola through each point triple.
// One order better than the trapezoid for smooth integrands; used where metric
// tolerances are tighter than O(dx^2).
std::vector<double> cumulative_parabolic(std::span<const double> f, double dx);

struct GaussLegendreRule {
  std::vector<double> node;    // on (-1, 1), ascending
  std::vector<double> weight;  // sums to 2

  static const GaussLegendreRule& panel16();
  static GaussLegendreRule make(int n);
};

struct QuadratureOutcome {
  double value = 0.0;
  double rel_error_estimate = 0.0;  // |last doubling change| / max(|value|, floor)
  int panels = 0;
  bool converged = false;
};

// Integrates f over [a, b] with 16-point Gauss-Legendre panels, doubling the
// panel count until the doubling change drops below rel_tol. Deterministic:
// the panel sequence is fixed by (a, b, rel_tol, max_panels).
QuadratureOutcome integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double rel_tol,
                                     int initial_panels = 4,
                                     int max_panels = 4096);

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes) through
// (x_i, y_i) with strictly increasing x. Used to invert cumulative
// distributions without overshoot.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  // Solves y(x) = target on an interval where y is monotone increasing.
  double solve(double target) const;

 private:
  std::vector<double> x_, y_, slope_;
};

// Cubic Lagrange interpolation of values tabulated on the uniform grid
// x_i = i * dx, i = 0..n-1; clamps to the table range.
double interp_cubic_uniform(std::span<const double> values, double dx, double x);

}  // namespace sn
