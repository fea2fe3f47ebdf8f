#include "sn/fit.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "sn/errors.hpp"

namespace sn {

namespace {

struct LinearFit {
  double a = 0.0;  // cos coefficient
  double b = 0.0;  // sin coefficient
  double c = 0.0;  // offset
  double residual_sq = 0.0;
  bool ok = false;
};

// Normal equations for y ~ a cos(wt) + b sin(wt) + c.
LinearFit fit_at_omega(std::span<const double> t, std::span<const double> y,
                       double omega) {
  double scc = 0, scs = 0, sc = 0, sss = 0, ss = 0, sn = 0;
  double syc = 0, sys = 0, sy = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ci = std::cos(omega * t[i]);
    const double si = std::sin(omega * t[i]);
    scc += ci * ci;
    scs += ci * si;
    sc += ci;
    sss += si * si;
    ss += si;
    sn += 1.0;
    syc += y[i] * ci;
    sys += y[i] * si;
    sy += y[i];
    syy += y[i] * y[i];
  }
  // 3x3 solve by Cramer's rule.
  const double m[3][3] = {{scc, scs, sc}, {scs, sss, ss}, {sc, ss, sn}};
  const double rhs[3] = {syc, sys, sy};
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double det = det3(m);
  LinearFit out;
  if (std::abs(det) < 1e-300) return out;
  double sol[3];
  for (int col = 0; col < 3; ++col) {
    double mc[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) mc[r][c] = (c == col) ? rhs[r] : m[r][c];
    sol[col] = det3(mc) / det;
  }
  out.a = sol[0];
  out.b = sol[1];
  out.c = sol[2];
  // ||y - X sol||^2 expanded; clamp tiny negative roundoff.
  double rss = syy - 2.0 * (sol[0] * syc + sol[1] * sys + sol[2] * sy);
  rss += sol[0] * sol[0] * scc + sol[1] * sol[1] * sss + sol[2] * sol[2] * sn;
  rss += 2.0 * (sol[0] * sol[1] * scs + sol[0] * sol[2] * sc + sol[1] * sol[2] * ss);
  out.residual_sq = std::max(0.0, rss);
  out.ok = true;
  return out;
}

}  // namespace

SinusoidFit extract_frequency(std::span<const double> t,
                              std::span<const double> y,
                              double expected_omega) {
  if (t.size() != y.size() || t.size() < 8)
    throw ValidationError("frequency fit: need matching series with >= 8 samples");
  if (!(expected_omega > 0.0))
    throw ValidationError("frequency fit: expected omega must be > 0");
  const double span = t.back() - t.front();
  if (span * expected_omega < 5.0 * 2.0 * std::numbers::pi)
    throw ValidationError("frequency fit: series must span >= 5 periods of the "
                          "expected frequency");

  auto residual = [&](double omega) { return fit_at_omega(t, y, omega).residual_sq; };

  // Coarse scan across +-20% keeps golden section inside the main lobe.
  const int scan_points = 321;
  const double lo = 0.8 * expected_omega, hi = 1.2 * expected_omega;
  double best_omega = expected_omega;
  double best_res = residual(expected_omega);
  for (int i = 0; i < scan_points; ++i) {
    const double w = lo + (hi - lo) * i / (scan_points - 1);
    const double r = residual(w);
    if (r < best_res) {
      best_res = r;
      best_omega = w;
    }
  }

  const double step = (hi - lo) / (scan_points - 1);
  double a = best_omega - step, b = best_omega + step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = residual(x1), f2 = residual(x2);
  for (int iter = 0; iter < 200 && (b - a) > 1e-13 * expected_omega; ++iter) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = residual(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = residual(x2);
    }
  }
  const double omega = 0.5 * (a + b);
  const LinearFit lin = fit_at_omega(t, y, omega);

  SinusoidFit fit;
  fit.converged = lin.ok;
  fit.omega = omega;
  fit.amplitude = std::hypot(lin.a, lin.b);
  fit.phase = std::atan2(lin.b, lin.a);
  fit.offset = lin.c;
  fit.residual_rms = std::sqrt(lin.residual_sq / static_cast<double>(t.size()));
  fit.high_residual = fit.residual_rms > 1e-2 * std::max(fit.amplitude, 1e-300);
  return fit;
}

}  // namespace sn
