#pragma once

#include <vector>

namespace sn {

// sign * exp(log_abs); sign == 0 encodes an exact zero.
struct LogValue {
  double log_abs = 0.0;
  int sign = 0;

  double value() const;
};

// Physicists' Hermite polynomial H_n(x) by the three-term recurrence, carried
// internally in rescaled form so that n of a few hundred does not overflow.
// Returns +/-inf when the result exceeds the double range.
double hermite_h(int n, double x);
LogValue hermite_h_log(int n, double x);

// log |h_n(x)| and sign for the orthonormalised polynomial
// h_n = H_n / sqrt(2^n n! sqrt(pi)); exp(-x^2) h_m h_n integrates to
// delta_{mn}. The oscillator eigenfunction is psi_n = h_n exp(-x^2/2).
LogValue hermite_orthonormal_log(int n, double x);
LogValue hermite_function_log(int n, double x);  // psi_n, bounded in x

// Gauss-Hermite rule for weight exp(-x^2). Weights are stored as logarithms:
// for large rules the extreme weights underlie the double range, while the
// integrand factors they multiply are correspondingly huge.
struct GaussHermiteRule {
  std::vector<double> node;        // ascending
  std::vector<double> log_weight;  // ln w_i

  static GaussHermiteRule make(int m);  // Newton on the scaled recurrence
};

// Shared quadrature context for the spectral functions. Immutable after
// construction; construction runs a hard self-test (moment identities and
// orthonormality up to max_n) and throws on failure.
class HermiteWorkspace {
 public:
  explicit HermiteWorkspace(int max_n = 200);

  int max_n() const { return max_n_; }

  // Checked H_n evaluation (n > max_n rejected).
  double hermite(int n, double x) const;

  // Rule whose polynomial exactness covers integrands of degree 4n.
  const GaussHermiteRule& rule_for(int n) const;

 private:
  int max_n_;
  std::vector<int> bucket_sizes_;
  std::vector<GaussHermiteRule> rules_;
};

}  // namespace sn
