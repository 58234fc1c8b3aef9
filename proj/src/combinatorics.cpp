#include "nearcol/combinatorics.hpp"

#include <vector>

namespace nearcol {

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) throw std::domain_error("binomial: k out of range");
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (unsigned i = 0; i < k; ++i) {
    result *= n - i;
    result /= i + 1;  // product of i+1 consecutive integers is divisible by i+1
  }
  return result;
}

BigInt partial_binomial_sum(unsigned n, unsigned k) {
  if (k > n) throw std::domain_error("partial_binomial_sum: k out of range");
  BigInt term = 1;
  BigInt sum = 1;
  for (unsigned j = 1; j <= k; ++j) {
    term *= n - j + 1;
    term /= j;
    sum += term;
  }
  return sum;
}

BigInt stirling2(unsigned n, unsigned k) {
  if (k > n) throw std::domain_error("stirling2: k out of range");
  if (k == 0) return n == 0 ? 1 : 0;
  // row-by-row table: S(i, j) = j S(i-1, j) + S(i-1, j-1)
  std::vector<BigInt> row(k + 1, 0);
  row[0] = 1;  // S(0, 0)
  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned j = std::min(i, k); j >= 1; --j) {
      row[j] = j * row[j] + row[j - 1];
    }
    row[0] = 0;
  }
  return row[k];
}

ExactProb ball_volume(unsigned n, unsigned epsilon) {
  BallGeometry{n, epsilon}.validate();
  return ExactProb::from_rational(BigRat(partial_binomial_sum(n, epsilon), BigInt(1) << n));
}

long double binary_entropy(long double x) {
  if (x < 0.0L || x > 1.0L) throw std::domain_error("binary_entropy: x outside [0,1]");
  if (x == 0.0L || x == 1.0L) return 0.0L;
  return -x * std::log2(x) - (1.0L - x) * std::log2(1.0L - x);
}

EntropyBracket entropy_volume_bounds(unsigned n, unsigned k) {
  if (k < 1 || 2 * k >= n) throw std::domain_error("entropy_volume_bounds: need 1 <= k < n/2");
  const long double r = static_cast<long double>(k) / n;
  const long double nh = n * binary_entropy(r);
  return EntropyBracket{nh - 0.5L * std::log2(8.0L * k * (1.0L - r)), nh};
}

ExactProb intersection_measure(unsigned n, unsigned epsilon, unsigned d) {
  BallGeometry{n, epsilon}.validate();
  if (d > n) throw std::domain_error("intersection_measure: d > n");
  BigInt count = 0;
  const unsigned k_lo = d > epsilon ? d - epsilon : 0;
  const unsigned k_hi = std::min(epsilon, d);
  for (unsigned k = k_lo; k <= k_hi; ++k) {
    const unsigned cap = std::min(epsilon - k, epsilon + k - d);
    count += binomial(d, k) * partial_binomial_sum(n - d, std::min(cap, n - d));
  }
  return ExactProb::from_rational(BigRat(count, BigInt(1) << n));
}

IntersectionUpperBounds intersection_upper_bound(unsigned n, unsigned epsilon, unsigned d) {
  // d = 2 epsilon + 1 (just past disjointness) is admitted as a sanity case
  if (d > 2 * epsilon + 1) throw std::domain_error("intersection_upper_bound: d > 2 epsilon + 1");
  if (2 * epsilon >= n) throw std::domain_error("intersection_upper_bound: epsilon/n >= 1/2");
  const long double r = static_cast<long double>(epsilon) / n;
  const unsigned half = (d + 1) / 2;
  const long double inner = half > epsilon ? 0.0L : static_cast<long double>(epsilon - half) / n;
  const long double tight = n * (binary_entropy(inner) - 1.0L) + d;
  const long double relaxed =
      n * (binary_entropy(r) - 1.0L) + d + half * std::log2(r / (1.0L - r));
  return IntersectionUpperBounds{LogProb::from_log2(tight), LogProb::from_log2(relaxed)};
}

LogProb intersection_lower_bound(unsigned n, unsigned epsilon, unsigned d) {
  if (d > 2 * epsilon) throw std::domain_error("intersection_lower_bound: d > 2 epsilon");
  if (2 * epsilon >= n) throw std::domain_error("intersection_lower_bound: epsilon/n >= 1/2");
  const long double nn = n;
  if (d < epsilon) {
    // 2^{d-n} sum_{i<=eps-d} C(n-d, i), bounded through the entropy bracket
    const long double rr = static_cast<long double>(epsilon - d) / (n - d);
    const long double lg = (static_cast<long double>(d) - nn) +
                           (nn - d) * binary_entropy(rr) -
                           0.5L * std::log2(8.0L * (epsilon - d) * (1.0L - rr));
    return LogProb::from_log2(lg);
  }
  if (d == epsilon + 1) {
    // sharp special case: at least 2^eps - 1 points
    if (epsilon == 0) return LogProb::zero();
    return LogProb::from_ratio((BigInt(1) << epsilon) - 1, BigInt(1) << n);
  }
  if (2 * d < 3 * epsilon) {
    // eps <= d < (3/2) eps: 2^{-n} (2^eps - 2^{eps h((d-eps)/eps)})
    const long double frac = static_cast<long double>(d - epsilon) / epsilon;
    const long double t = epsilon * (binary_entropy(frac) - 1.0L);  // < 0
    const long double lg = epsilon - nn + std::log1p(-std::exp2(t)) / static_cast<long double>(M_LN2);
    return LogProb::from_log2(lg);
  }
  // (3/2) eps <= d <= 2 eps
  const unsigned m = 2 * epsilon - d;
  if (m == 0) return LogProb::from_ratio(1, BigInt(1) << n);  // single k term, C(eps, eps)
  const long double frac = static_cast<long double>(m) / epsilon;
  const long double lg = -nn + epsilon * binary_entropy(frac) -
                         0.5L * std::log2(8.0L * m * (1.0L - frac));
  return LogProb::from_log2(lg);
}

}  // namespace nearcol
