#pragma once

#include "nearcol/logprob.hpp"
#include "nearcol/metric_bounds.hpp"

#include <cstdint>
#include <optional>

namespace nearcol {

/// An attacker who, after every failed trial, learns kappa candidate
/// templates that cannot be enrolled and never tries them again.
/// kappa = 0 is guessing with replacement (geometric trials), kappa = 1 is
/// guessing without replacement. kappa may exceed 2^53 and is kept exact;
/// only the ratio kappa / 2^n enters floating-point evaluation.
struct AttackerConfig {
  unsigned n = 1;            // log2 of the universe size
  long double p = 0.0L;      // per-trial success probability of the naive attacker
  BigInt kappa = 0;          // templates inferred dead per failed trial

  void validate() const {
    if (n < 1 || n > 16384) throw std::domain_error("AttackerConfig: bad n");
    if (p < 0.0L || p > 1.0L) throw std::domain_error("AttackerConfig: p outside [0,1]");
    if (kappa < 0) throw std::domain_error("AttackerConfig: kappa < 0");
  }

  /// Largest trial index with a defined distribution:
  /// ceil(2^n (1-p) / kappa) + 1 (whole support of the first-success law).
  std::uint64_t horizon() const;
};

/// P(first success at trial a), evaluated term by term in log space.
LogProb adaptive_pmf(const AttackerConfig& cfg, std::uint64_t a);

/// P(first success within a trials) = 1 - prod_{j=0}^{a-1} (1-p-jq)/(1-jq).
LogProb adaptive_cdf(const AttackerConfig& cfg, std::uint64_t a);

/// P(A(0)=a) / P(A(kappa)=a) = prod_{j=1}^{a-1} (1-jq) / (1-(j-1)q/(1-p)).
long double pmf_ratio(const AttackerConfig& cfg, std::uint64_t a);

/// A CDF variant whose failure product runs three trials ahead of the lemma
/// form (indices 1..i+2 instead of 0..i-1). It underestimates the success
/// probability by roughly (1-p)^3 and is inconsistent with the urn model,
/// but it is what the published ratio table was generated from; kept for
/// cross-checking those cells.
LogProb adaptive_cdf_shifted_product(const AttackerConfig& cfg, std::uint64_t a);

/// Both CDF-ratio readings at the given parameters, with p = N V_eps
/// (disjoint enrolled balls, the attacker-friendliest union size).
struct CdfRatioReport {
  long double adaptive_over_naive;          // lemma-form CDF ratio
  long double naive_over_adaptive;
  long double shifted_over_naive;           // shifted-product variant ratio
  long double discrepancy;                  // |adaptive_over_naive - shifted_over_naive|
};
CdfRatioReport cdf_ratio(const SystemParams& params, const BigInt& kappa, std::uint64_t a);

/// Smallest a with P(A(kappa) <= a) >= 1/2; nullopt when the median lies
/// beyond the distribution's horizon.
std::optional<std::uint64_t> median_trials_adaptive(const AttackerConfig& cfg);

}  // namespace nearcol
