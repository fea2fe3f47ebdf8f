#include "sn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "sn/errors.hpp"
#include "sn/quadrature.hpp"

namespace sn {

namespace {

constexpr double kPi = std::numbers::pi;

// Sum of exp(e_i) for non-negative terms given as exponents, stabilised by
// the running maximum.
class LogSum {
 public:
  void add(double exponent) {
    if (exponent == -std::numeric_limits<double>::infinity()) return;
    if (exponent > max_) {
      sum_ = sum_ * std::exp(max_ - exponent) + 1.0;
      max_ = exponent;
    } else {
      sum_ += std::exp(exponent - max_);
    }
  }
  double value() const {
    if (sum_ == 0.0) return 0.0;
    return std::exp(max_) * sum_;
  }
  double log_value() const { return max_ + std::log(sum_); }
  bool empty() const { return sum_ == 0.0; }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// log of e^{-z^2/2} P_n(z); -inf when the overlap underflows entirely.
double log_q_n(const HermiteWorkspace& ws, int n, double z) {
  const auto& rule = ws.rule_for(n);
  LogSum sum;
  const double half_z = 0.5 * z;
  for (std::size_t i = 0; i < rule.node.size(); ++i) {
    const double u = rule.node[i] / std::numbers::sqrt2;
    const LogValue ha = hermite_orthonormal_log(n, u + half_z);
    const LogValue hb = hermite_orthonormal_log(n, u - half_z);
    if (ha.sign == 0 || hb.sign == 0) continue;
    sum.add(rule.log_weight[i] + 2.0 * ha.log_abs + 2.0 * hb.log_abs);
  }
  if (sum.empty()) return -std::numeric_limits<double>::infinity();
  // P_n(z) = sqrt(pi) * sum(w_i h_n(a_i)^2 h_n(b_i)^2) with a,b = u +/- z/2
  // after folding the two displaced terms together and substituting
  // x = sqrt(2) u into the Gauss-Hermite weight.
  return sum.log_value() + 0.5 * std::log(kPi) - 0.5 * z * z;
}

double erf_factor(double zeta) {
  // erf(sqrt(2) zeta) / (2 zeta) - sqrt(2/pi); -> 0 as zeta -> 0.
  const double sqrt_2_over_pi = std::sqrt(2.0 / kPi);
  if (std::abs(zeta) < 1e-4) {
    const double z2 = zeta * zeta;
    return sqrt_2_over_pi * (-2.0 * z2 / 3.0 + 2.0 * z2 * z2 / 5.0);
  }
  return std::erf(std::numbers::sqrt2 * zeta) / (2.0 * zeta) - sqrt_2_over_pi;
}

}  // namespace

SpectralParams SpectralParams::make(double mass_kg, double omega0,
                                    const MaterialRecord& material) {
  if (!(mass_kg > 0.0) || !(omega0 > 0.0))
    throw ValidationError("spectral params: mass and omega0 must be positive");
  SpectralParams p;
  p.total_mass = mass_kg;
  p.omega0 = omega0;
  p.material = material;
  const double sigma = material.sigma_m();
  p.alpha = 2.0 * sigma * std::sqrt(mass_kg * omega0 / constants.hbar);
  p.prefactor = constants.G * constants.hbar * material.m_atom_kg() /
                (4.0 * sigma * sigma * sigma * omega0);
  return p;
}

double q_n(const HermiteWorkspace& ws, int n, double z) {
  const double lq = log_q_n(ws, n, z);
  if (lq == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lq);
}

double p_n(const HermiteWorkspace& ws, int n, double z) {
  if (!std::isfinite(z)) throw ValidationError("p_n: z must be finite");
  const double lq = log_q_n(ws, n, z);
  if (lq == -std::numeric_limits<double>::infinity()) return 0.0;
  const double lp = lq + 0.5 * z * z;
  if (lp > 709.0) return std::numeric_limits<double>::infinity();
  return std::exp(lp);
}

FnOutcome f_n_detailed(const HermiteWorkspace& ws, int n, double alpha,
                       double rel_tol) {
  if (!(alpha > 0.0)) throw ValidationError("f_n: alpha must be positive");
  if (n < 0 || n > ws.max_n())
    throw ValidationError("f_n: n out of range [0, max_n]");

  // The overlap factor q_n(alpha zeta) dies off Gaussianly once alpha zeta
  // exceeds twice the classical turning point, which sets the cut-off.
  const double z_support = 2.0 * std::sqrt(2.0 * n + 1.0) + 16.0;
  const double zeta_max = std::max(20.0, z_support) / alpha;

  const auto integrand = [&](double zeta) {
    return q_n(ws, n, alpha * zeta) * erf_factor(zeta);
  };
  const QuadratureOutcome q =
      integrate_adaptive(integrand, 0.0, zeta_max, rel_tol, 8, 4096);
  if (!q.converged)
    throw QuadratureError("f_n quadrature did not converge", q.rel_error_estimate);

  const double scale = alpha * alpha * alpha * std::sqrt(2.0 / kPi);
  return {scale * q.value, q.rel_error_estimate, q.panels};
}

double f_n(const HermiteWorkspace& ws, int n, double alpha) {
  return f_n_detailed(ws, n, alpha).value;
}

double energy_shift(const HermiteWorkspace& ws, int n, const SpectralParams& p) {
  return -p.prefactor * f_n(ws, n, p.alpha);
}

std::vector<SpectrumLine> transition_spectrum(const HermiteWorkspace& ws,
                                              const SpectralParams& p,
                                              int n_max, int delta_n,
                                              double temperature_k, int jobs) {
  if (delta_n < 1) throw ValidationError("transition spectrum: delta_n must be >= 1");
  if (n_max < delta_n)
    throw ValidationError("transition spectrum: n_max must be >= delta_n");
  if (n_max > ws.max_n())
    throw ValidationError("transition spectrum: n_max exceeds workspace max_n");
  if (temperature_k < 0.0)
    throw ValidationError("transition spectrum: temperature must be >= 0");

  // All shifts first (each line reuses two of them), split across threads.
  std::vector<double> shift(static_cast<std::size_t>(n_max) + 1, 0.0);
  unsigned n_threads = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_max) + 1);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int n = static_cast<int>(t); n <= n_max;
             n += static_cast<int>(n_threads))
          shift[static_cast<std::size_t>(n)] = energy_shift(ws, n, p);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<SpectrumLine> lines;
  lines.reserve(static_cast<std::size_t>(n_max - delta_n) + 1);
  double weight_sum = 0.0;
  for (int n = 0; n + delta_n <= n_max; ++n) {
    SpectrumLine line;
    line.n_lower = n;
    line.n_upper = n + delta_n;
    line.delta_n = delta_n;
    line.omega_unperturbed = delta_n * p.omega0;
    line.omega_shift = (shift[static_cast<std::size_t>(n + delta_n)] -
                        shift[static_cast<std::size_t>(n)]) /
                       constants.hbar;
    if (temperature_k == 0.0) {
      line.weight = (n == 0) ? 1.0 : 0.0;
    } else {
      line.weight = std::exp(-static_cast<double>(n) * constants.hbar * p.omega0 /
                             (constants.kB * temperature_k));
    }
    weight_sum += line.weight;
    lines.push_back(line);
  }
  for (auto& line : lines) line.weight /= weight_sum;
  return lines;
}

}  // namespace sn
