#pragma once

#include "nearcol/combinatorics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nearcol {

/// Metric-space system parameters: template bit-length n, database size N,
/// decision threshold epsilon, plus optional attacker knobs.
struct SystemParams {
  unsigned n = 1;
  std::uint64_t users = 1;  // N
  unsigned epsilon = 0;
  std::optional<double> alpha;        // insider upper-bound slack exponent
  std::optional<std::uint64_t> ell;   // number of attacking insiders

  void validate() const {
    if (n < 1) throw std::domain_error("SystemParams: n >= 1 required");
    if (epsilon > n) throw std::domain_error("SystemParams: epsilon > n");
    if (users < 1) throw std::domain_error("SystemParams: N >= 1 required");
    if (ell && (*ell < 1 || *ell > users))
      throw std::domain_error("SystemParams: ell outside [1, N]");
  }
};

/// Named precondition check attached to a bound.
struct ValidityFlag {
  std::string name;
  bool satisfied;
};

inline bool all_valid(const std::vector<ValidityFlag>& flags) {
  for (const auto& f : flags)
    if (!f.satisfied) return false;
  return true;
}

/// Which family of closed forms to evaluate.
///  - ExactVolume: exact V_eps and I^eps_{eps+1} (big-integer sums) with the
///    ln 2 median constant; the tighter family.
///  - Entropy: the pure entropy exponents as published in the reference
///    tables (no ln 2 constant, insider upper at alpha unless supplied).
enum class BoundForm { ExactVolume, Entropy };

enum class Rounding { Floor, Nearest };

/// Log2 bounds on a median trial/round count.
struct MetricBound {
  long double lower_log2 = 0.0L;
  long double upper_log2 = 0.0L;
  Rounding rounding = Rounding::Floor;
  bool clipped_lower = false;
  bool clipped_upper = false;
  bool upper_valid = true;  // false when the upper-bound denominator is <= 0
  std::vector<ValidityFlag> validity;

  long long lower_display() const { return display(lower_log2); }
  long long upper_display() const { return display(upper_log2); }

 private:
  long long display(long double v) const {
    if (v <= 0.0L) return 0;
    return rounding == Rounding::Floor ? static_cast<long long>(std::floor(v))
                                       : llroundl(v);
  }
};

/// Probability interval with validity flags.
struct ProbabilityBounds {
  LogProb lower;
  LogProb upper;
  std::vector<ValidityFlag> validity;
};

/// P(some other enrolled template lies within epsilon of a fixed one):
/// 1 - (1 - V_eps)^{N-1}.
LogProb strong_nc_probability(const SystemParams& params);

/// Median number of trials for an outsider guessing against N enrolled
/// templates. Lower/upper log2 exponents; negative exponents clip to 0.
MetricBound outsider_bounds(const SystemParams& params,
                            BoundForm form = BoundForm::ExactVolume);

/// Outsider bounds when the database holds pairwise-distinct templates
/// (sampling without replacement): both exponents pick up a
/// -log2(1 + c (N-1)/2^{n+1}) correction.
MetricBound outsider_bounds_distinct(const SystemParams& params,
                                     BoundForm form = BoundForm::ExactVolume);

/// Probability that some pair of enrolled templates is within epsilon:
///   upper: 1 - prod_{j=1}^{N} (1 - (j-1) V_eps)
///   lower: 1 - prod_{j=1}^{N} (1 - (j-1) V_eps + C(j-1,2) I^eps_{eps+1})
/// Out-of-regime parameters are reported through the validity flags.
ProbabilityBounds weak_nc_probability_bounds(const SystemParams& params);

/// Median number of rounds until some insider impersonates another user.
MetricBound insider_bounds(const SystemParams& params,
                           BoundForm form = BoundForm::ExactVolume);

/// Insider bounds with only ell attacking users among N (params.ell).
MetricBound insider_bounds_subset(const SystemParams& params,
                                  BoundForm form = BoundForm::ExactVolume);

/// Smallest alpha for which the insider upper-bound size condition holds
/// with equality (solved by bisection); nullopt when N exceeds the condition
/// at every alpha < h(eps/n).
std::optional<double> min_feasible_alpha(const SystemParams& params);

/// Database security scores.
///   S1 = 1 - (weak near-collision upper bound), in [0, 1]
///   S2 / S3 = log2 of the outsider / insider lower trial bound minus 128.
/// The _table variants apply the published rounding convention (floor for
/// the outsider exponent, nearest for the insider one) before subtracting.
struct SecurityScores {
  double s1 = 0.0;
  long double s2_raw = 0.0L;
  long double s3_raw = 0.0L;
  long long s2_table = 0;
  long long s3_table = 0;
  std::vector<ValidityFlag> validity;
};
SecurityScores security_scores(const SystemParams& params);

/// S1 alone (the weak-NC survival product), used by the robustness searches.
double s1_score(unsigned n, std::uint64_t users, unsigned epsilon);

/// Robustness thresholds: extremal free parameter keeping S1 >= 1/2.
std::optional<unsigned> max_epsilon_for_robustness(unsigned n, std::uint64_t users);
std::optional<unsigned> min_dimension_for_robustness(unsigned epsilon, std::uint64_t users);
std::optional<std::uint64_t> max_users_for_robustness(unsigned epsilon, unsigned n);

}  // namespace nearcol
