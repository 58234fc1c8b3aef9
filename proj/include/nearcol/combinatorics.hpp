#pragma once

#include "nearcol/logprob.hpp"

#include <utility>

namespace nearcol {

/// A Hamming ball in Z_2^n: dimension n and decision threshold epsilon.
struct BallGeometry {
  unsigned n = 1;
  unsigned epsilon = 0;

  void validate() const {
    if (n < 1) throw std::domain_error("BallGeometry: n must be >= 1");
    if (epsilon > n) throw std::domain_error("BallGeometry: epsilon > n");
  }
};

/// An exact probability together with its log2 form (derived from the exact value).
struct ExactProb {
  BigRat value;
  LogProb log2;

  static ExactProb from_rational(BigRat v) {
    ExactProb p;
    p.log2 = LogProb::from_rational(v);
    p.value = std::move(v);
    return p;
  }
};

/// Exact C(n, k). Throws on k > n.
BigInt binomial(unsigned n, unsigned k);

/// Exact sum_{j=0}^{k} C(n, j).
BigInt partial_binomial_sum(unsigned n, unsigned k);

/// Exact Stirling number of the second kind, by the additive recurrence.
BigInt stirling2(unsigned n, unsigned k);

/// V_eps = 2^-n * sum_{k<=eps} C(n,k), exact with derived log2 form.
ExactProb ball_volume(unsigned n, unsigned epsilon);

/// Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x), h(0) = h(1) = 0.
long double binary_entropy(long double x);

/// Entropy bracket for log2 sum_{j<=k} C(n,j), valid for 1 <= k, k/n < 1/2:
///   n h(k/n) - (1/2) log2(8 k (1 - k/n))  <=  log2 sum  <=  n h(k/n)
struct EntropyBracket {
  long double lower_log2;
  long double upper_log2;
};
EntropyBracket entropy_volume_bounds(unsigned n, unsigned k);

/// Measure of the intersection of two epsilon-balls whose centers are at
/// Hamming distance d. Zero exactly when d > 2*epsilon.
ExactProb intersection_measure(unsigned n, unsigned epsilon, unsigned d);

/// The two entropy-form upper bounds on the intersection measure
/// (the second is the concavity relaxation of the first; both >= exact).
/// Requires d <= 2*epsilon and epsilon/n < 1/2.
struct IntersectionUpperBounds {
  LogProb tight;    // 2^{n(h((eps-ceil(d/2))/n) - 1) + d}
  LogProb relaxed;  // 2^{n(h(eps/n) - 1) + d} * ((eps/n)/(1-eps/n))^{ceil(d/2)}
};
IntersectionUpperBounds intersection_upper_bound(unsigned n, unsigned epsilon, unsigned d);

/// Regime-selected lower bound on the intersection measure; always <= exact.
/// Requires d <= 2*epsilon and epsilon/n < 1/2. The regime is picked by
/// comparing d against epsilon, epsilon+1 and (3/2) epsilon.
LogProb intersection_lower_bound(unsigned n, unsigned epsilon, unsigned d);

}  // namespace nearcol
