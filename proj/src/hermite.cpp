#include "sn/hermite.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sn/errors.hpp"

namespace sn {

namespace {

constexpr double kRescaleLimit = 1e130;

// Pair (prev, cur) of recurrence values sharing a common log offset.
struct ScaledPair {
  double prev = 0.0;
  double cur = 0.0;
  double log_offset = 0.0;

  void rescale() {
    const double m = std::max(std::abs(prev), std::abs(cur));
    if (m > kRescaleLimit || (m > 0.0 && m < 1.0 / kRescaleLimit)) {
      prev /= m;
      cur /= m;
      log_offset += std::log(m);
    }
  }

  LogValue cur_log() const {
    if (cur == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {log_offset + std::log(std::abs(cur)), cur > 0.0 ? 1 : -1};
  }
};

// Runs the orthonormal recurrence h_k = x sqrt(2/k) h_{k-1} - sqrt((k-1)/k) h_{k-2}
// up to k = n, starting from the oscillator ground state (Gaussian included),
// so every intermediate stays bounded for any x.
ScaledPair hermite_function_pair(int n, double x) {
  ScaledPair s;
  s.log_offset = -0.25 * std::log(std::numbers::pi) - 0.5 * x * x;
  s.prev = 0.0;
  s.cur = 1.0;  // psi_0 = pi^{-1/4} e^{-x^2/2} folded into log_offset
  for (int k = 1; k <= n; ++k) {
    const double next =
        x * std::sqrt(2.0 / k) * s.cur - std::sqrt((k - 1.0) / k) * s.prev;
    s.prev = s.cur;
    s.cur = next;
    s.rescale();
  }
  return s;
}

}  // namespace

double LogValue::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

LogValue hermite_function_log(int n, double x) {
  if (n < 0) throw ValidationError("hermite: n must be >= 0");
  return hermite_function_pair(n, x).cur_log();
}

LogValue hermite_orthonormal_log(int n, double x) {
  LogValue v = hermite_function_log(n, x);
  if (v.sign != 0) v.log_abs += 0.5 * x * x;
  return v;
}

LogValue hermite_h_log(int n, double x) {
  LogValue v = hermite_orthonormal_log(n, x);
  if (v.sign != 0) {
    // multiply back the normalisation sqrt(2^n n! sqrt(pi))
    double log_norm = 0.25 * std::log(std::numbers::pi) +
                      0.5 * n * std::numbers::ln2;
    log_norm += 0.5 * std::lgamma(n + 1.0);
    v.log_abs += log_norm;
  }
  return v;
}

double hermite_h(int n, double x) {
  const LogValue v = hermite_h_log(n, x);
  if (v.sign == 0) return 0.0;
  if (v.log_abs > 709.0)
    return v.sign * std::numeric_limits<double>::infinity();
  return v.value();
}

GaussHermiteRule GaussHermiteRule::make(int m) {
  if (m < 1) throw ValidationError("Gauss-Hermite rule needs m >= 1");
  GaussHermiteRule rule;
  rule.node.assign(m, 0.0);
  rule.log_weight.assign(m, 0.0);

  const int half = (m + 1) / 2;
  std::vector<double> roots;  // positive roots found so far, descending
  roots.reserve(half);
  for (int i = 0; i < half; ++i) {
    // Root estimates, largest first.
    double z;
    if (i == 0) {
      z = std::sqrt(2.0 * m + 1.0) - 1.85575 * std::pow(2.0 * m + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z = roots[0] - 1.14 * std::pow(static_cast<double>(m), 0.426) / roots[0];
    } else if (i == 2) {
      z = 1.86 * roots[1] - 0.86 * roots[0];
    } else if (i == 3) {
      z = 1.91 * roots[2] - 0.91 * roots[1];
    } else {
      z = 2.0 * roots[i - 1] - roots[i - 2];
    }

    ScaledPair pair;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
      pair = hermite_function_pair(m, z);
      // Newton on psi_m; psi_m' = sqrt(2m) psi_{m-1} - x psi_m, and the shared
      // log offset cancels in the ratio.
      const double denom = std::sqrt(2.0 * m) * pair.prev - z * pair.cur;
      const double step = pair.cur / denom;
      z -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericalError("Gauss-Hermite node iteration failed to converge");
    pair = hermite_function_pair(m, z);

    // ln w = -ln m - 2 ln |h_{m-1}(z)| with h the orthonormal polynomial;
    // pair.prev carries psi_{m-1}, i.e. h_{m-1} e^{-z^2/2}.
    const double log_psi_prev = pair.log_offset + std::log(std::abs(pair.prev));
    const double log_h_prev = log_psi_prev + 0.5 * z * z;
    const double log_w = -std::log(static_cast<double>(m)) - 2.0 * log_h_prev;

    rule.node[m - 1 - i] = z;
    rule.node[i] = -z;
    rule.log_weight[m - 1 - i] = log_w;
    rule.log_weight[i] = log_w;
    roots.push_back(z);
  }
  if (m % 2 == 1) rule.node[m / 2] = 0.0;
  return rule;
}

HermiteWorkspace::HermiteWorkspace(int max_n) : max_n_(max_n) {
  if (max_n_ < 0) throw ValidationError("hermite workspace: max_n must be >= 0");
  // Rule of size m integrates exp(-x^2) times polynomials of degree 2m-1
  // exactly; the P_n integrand has degree 4n, so m >= 2n+1.
  for (int m : {64, 128, 256, 512, 1024}) {
    bucket_sizes_.push_back(m);
    rules_.push_back(GaussHermiteRule::make(m));
    if (m - 1 >= 2 * max_n_ + 1) break;
  }
  if (2 * max_n_ + 1 > bucket_sizes_.back())
    throw ValidationError("hermite workspace: max_n too large for rule table");

  // Construction self-test: moment identities and orthonormality.
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (std::size_t b = 0; b < rules_.size(); ++b) {
    const auto& rule = rules_[b];
    double w_sum = 0.0, wx2_sum = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const double w = std::exp(rule.log_weight[i]);
      w_sum += w;
      wx2_sum += w * rule.node[i] * rule.node[i];
    }
    if (std::abs(w_sum - sqrt_pi) > 1e-12 * sqrt_pi ||
        std::abs(wx2_sum - 0.5 * sqrt_pi) > 1e-12 * sqrt_pi)
      throw NumericalError("Gauss-Hermite self-test failed: moment identities");

    const int n_probe = std::min(max_n_, (bucket_sizes_[b] - 1) / 2);
    double ortho = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const LogValue h = hermite_orthonormal_log(n_probe, rule.node[i]);
      if (h.sign == 0) continue;
      ortho += std::exp(rule.log_weight[i] + 2.0 * h.log_abs);
    }
    if (std::abs(ortho - 1.0) > 1e-10)
      throw NumericalError("Gauss-Hermite self-test failed: orthonormality at n = " +
                           std::to_string(n_probe));
  }
}

double HermiteWorkspace::hermite(int n, double x) const {
  if (n < 0 || n > max_n_)
    throw ValidationError("hermite: n out of range [0, max_n]");
  return hermite_h(n, x);
}

const GaussHermiteRule& HermiteWorkspace::rule_for(int n) const {
  if (n < 0 || n > max_n_)
    throw ValidationError("hermite workspace: n out of range [0, max_n]");
  const int need = 2 * n + 1;
  for (std::size_t b = 0; b < bucket_sizes_.size(); ++b)
    if (bucket_sizes_[b] >= need) return rules_[b];
  throw ValidationError("hermite workspace: no rule large enough");
}

}  // namespace sn
