#pragma once

#include "nearcol/logprob.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nearcol {

/// Empirical accuracy rates of a matcher / recognition system.
/// FAR and FRR are derived from the matcher-level rates:
///   FAR = FMR (1 - FTA),  FRR = FTA + FNMR (1 - FTA)
struct AccuracyRates {
  std::optional<double> fmr;
  std::optional<double> fnmr;
  std::optional<double> fta;
  std::optional<double> fpir;
  std::optional<double> fnir;
  std::optional<double> far;
  std::optional<double> frr;
};

/// Fills FAR / FRR from the identities above. Throws if an over-specified
/// input disagrees with the identity by more than 1e-9 relative.
AccuracyRates derive_rates(const AccuracyRates& in);

/// Target security level: near-collision probability must stay below 1/lambda.
struct SecurityLevel {
  std::uint64_t lambda = 100;
};

/// Log2 trial-count bounds. The raw exponents follow the published table
/// convention (no ln 2 constant); median_log2 carries the exact geometric
/// median, which the raw bounds bracket only after adding log2(ln 2).
struct TrialBound {
  long double lower_log2 = 0.0L;
  long double upper_log2 = 0.0L;
  std::optional<long double> median_log2;
  bool unbounded = false;      // some per-user rate was exactly 0
  bool clipped = false;        // a negative exponent was clipped to 0
};

/// Median trial count for an outsider attacking a verification system, from
/// per-user false-match rates. Requires every rate in (0, 1/2]; a zero rate
/// yields the unbounded sentinel.
TrialBound outsider_trials_fmr(const std::vector<double>& per_user_fmr);

/// Identification-mode variant driven by FPIR.
TrialBound outsider_trials_fpir(double fpir);

/// Verification variant driven by system-level FAR and FTA; reduces to the
/// FMR bound with FMR_i = FAR_i / (1 - FTA_i).
TrialBound outsider_trials_far(const std::vector<double>& per_user_far,
                               const std::vector<double>& per_user_fta);

/// Birthday-style probability of at least one near-collision among N users:
/// 1 - (1 - FMR)^{N(N-1)/2}.
LogProb near_collision_probability_fmr(double fmr, std::uint64_t n_users);

/// Largest database size keeping the near-collision probability below
/// 1/lambda; the result is exact (locally adjusted after the closed form).
/// FMR = 0 is signalled by returning nullopt (unbounded).
std::optional<std::uint64_t> max_database_size(double fmr, SecurityLevel level);

/// Closed-form approximation sqrt(2 / (lambda FMR)).
std::optional<double> max_database_size_asymptotic(double fmr, SecurityLevel level);

}  // namespace nearcol
