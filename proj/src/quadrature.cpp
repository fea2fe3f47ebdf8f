#include "sn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sn/errors.hpp"

namespace sn {

double trapezoid(std::span<const double> f, double dx) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * dx;
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i)
    out[i] = out[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
  return out;
}

std::vector<double> cumulative_parabolic(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * dx * (f[0] + f[1]);
    return out;
  }
  // Integral over [x_i, x_{i+1}] of the parabola through (i-1, i, i+1),
  // averaged with the one through (i, i+1, i+2) where both exist.
  auto seg_left = [&](std::size_t i) {  // parabola anchored at i-1, i, i+1
    return dx / 12.0 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]);
  };
  auto seg_right = [&](std::size_t i) {  // parabola anchored at i, i+1, i+2
    return dx / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double seg;
    if (i == 0)
      seg = seg_right(i);
    else if (i + 2 >= n)
      seg = seg_left(i);
    else
      seg = 0.5 * (seg_left(i) + seg_right(i));
    out[i + 1] = out[i] + seg;
  }
  return out;
}

GaussLegendreRule GaussLegendreRule::make(int n) {
  if (n < 1) throw ValidationError("Gauss-Legendre rule needs n >= 1");
  GaussLegendreRule rule;
  rule.node.resize(n);
  rule.weight.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on the Bonnet recurrence.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p_prime = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      p_prime = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx_newton = p1 / p_prime;
      x -= dx_newton;
      if (std::abs(dx_newton) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * p_prime * p_prime);
    rule.node[i] = -x;
    rule.node[n - 1 - i] = x;
    rule.weight[i] = w;
    rule.weight[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule& GaussLegendreRule::panel16() {
  static const GaussLegendreRule rule = make(16);
  return rule;
}

QuadratureOutcome integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double rel_tol,
                                     int initial_panels, int max_panels) {
  const auto& rule = GaussLegendreRule::panel16();
  auto evaluate = [&](int panels) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double left = a + p * h;
      const double mid = left + 0.5 * h;
      double panel_sum = 0.0;
      for (std::size_t i = 0; i < rule.node.size(); ++i)
        panel_sum += rule.weight[i] * f(mid + 0.5 * h * rule.node[i]);
      sum += 0.5 * h * panel_sum;
    }
    return sum;
  };

  QuadratureOutcome out;
  int panels = std::max(1, initial_panels);
  double prev = evaluate(panels);
  while (panels * 2 <= max_panels) {
    panels *= 2;
    const double cur = evaluate(panels);
    const double scale = std::max(std::abs(cur), 1e-300);
    const double change = std::abs(cur - prev) / scale;
    out.value = cur;
    out.rel_error_estimate = change;
    out.panels = panels;
    if (change <= rel_tol) {
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  out.converged = false;
  return out;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw ValidationError("monotone cubic: need >= 2 matching points");
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x_[i + 1] - x_[i];
    if (!(h > 0.0)) throw ValidationError("monotone cubic: x must be increasing");
    d[i] = (y_[i + 1] - y_[i]) / h;
  }
  slope_.assign(n, 0.0);
  slope_[0] = d[0];
  slope_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    slope_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
  // Fritsch-Carlson limiter keeps the interpolant monotone on each interval.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      slope_[i] = slope_[i + 1] = 0.0;
      continue;
    }
    const double alpha = slope_[i] / d[i];
    const double beta = slope_[i + 1] / d[i];
    const double s = alpha * alpha + beta * beta;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      slope_[i] = tau * alpha * d[i];
      slope_[i + 1] = tau * beta * d[i];
    }
  }
}

double MonotoneCubic::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

double MonotoneCubic::solve(double target) const {
  if (target <= y_.front()) return x_.front();
  if (target >= y_.back()) return x_.back();
  // Bracket by table values, then bisect the cubic inside the cell.
  const auto it = std::upper_bound(y_.begin(), y_.end(), target);
  const std::size_t i = static_cast<std::size_t>(it - y_.begin()) - 1;
  double lo = x_[i], hi = x_[i + 1];
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (std::abs(hi) + 1.0)) break;
  }
  return 0.5 * (lo + hi);
}

double interp_cubic_uniform(std::span<const double> values, double dx, double x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
  if (n < 2) throw ValidationError("interp_cubic_uniform: table too small");
  double s = x / dx;
  if (s <= 0.0) return values[0];
  if (s >= static_cast<double>(n - 1)) return values[n - 1];
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(s);
  // Four-point stencil centred on the cell [i, i+1].
  std::ptrdiff_t i0 = std::clamp<std::ptrdiff_t>(i - 1, 0, n - 4);
  const double t = s - static_cast<double>(i0);
  const double f0 = values[i0], f1 = values[i0 + 1], f2 = values[i0 + 2],
               f3 = values[i0 + 3];
  // Lagrange form on nodes 0,1,2,3 evaluated at t in [0, 3].
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3;
}

}  // namespace sn
