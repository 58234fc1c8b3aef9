#include "nearcol/adaptive.hpp"

#include "nearcol/combinatorics.hpp"

#include <cmath>

namespace nearcol {

namespace {

long double kappa_ratio(const AttackerConfig& cfg) {
  if (cfg.kappa == 0) return 0.0L;
  return std::exp2(log2_bigint(cfg.kappa) - static_cast<long double>(cfg.n));
}

void check_horizon(const AttackerConfig& cfg, std::uint64_t a) {
  if (a < 1) throw std::domain_error("adaptive: trial index starts at 1");
  if (a > cfg.horizon()) throw std::domain_error("adaptive: trial index beyond horizon");
}

/// ln of the survival product prod_{j=0}^{a-1} (1-p-jq)/(1-jq).
/// Returns -inf once the failure pool is exhausted (survival 0).
long double ln_survival(long double p, long double q, std::uint64_t a) {
  long double sum = 0.0L, comp = 0.0L;
  for (std::uint64_t j = 0; j < a; ++j) {
    const long double jq = static_cast<long double>(j) * q;
    const long double denom = 1.0L - jq;
    // failure pool exhausted: the next trial succeeds surely
    if (denom <= 0.0L || 1.0L - p - jq <= 0.0L)
      return -std::numeric_limits<long double>::infinity();
    const long double term = std::log1p(-p / denom);
    // compensated accumulation; sums run to 1e4+ terms in the table sweeps
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

std::uint64_t AttackerConfig::horizon() const {
  validate();
  if (kappa == 0) return std::numeric_limits<std::uint64_t>::max();
  // ceil(2^n (1-p) / kappa) + 1, computed in log space; saturates at 2^63
  const long double lg = static_cast<long double>(n) +
                         std::log1p(-p) / static_cast<long double>(M_LN2) -
                         log2_bigint(kappa);
  if (lg >= 63.0L) return std::uint64_t(1) << 63;
  if (lg <= 0.0L) return 1;
  return static_cast<std::uint64_t>(std::ceil(std::exp2(lg))) + 1;
}

LogProb adaptive_pmf(const AttackerConfig& cfg, std::uint64_t a) {
  cfg.validate();
  check_horizon(cfg, a);
  if (cfg.p == 0.0L) return LogProb::zero();
  const long double q = kappa_ratio(cfg);
  if (q == 0.0L) {
    // geometric law
    return LogProb::from_log2(std::log2(cfg.p) +
                              (static_cast<long double>(a) - 1.0L) *
                                  std::log1p(-cfg.p) / static_cast<long double>(M_LN2));
  }
  const long double last_q = (static_cast<long double>(a) - 1.0L) * q;
  const long double last_denom = 1.0L - last_q;
  if (last_denom <= 0.0L) throw std::domain_error("adaptive_pmf: horizon overflow");
  const long double survival = ln_survival(cfg.p, q, a - 1);
  if (1.0L - cfg.p - last_q <= 0.0L) {
    // no failure states left: the trial succeeds surely, p(a) = survival mass
    return LogProb::from_log2(survival / static_cast<long double>(M_LN2));
  }
  const long double lg =
      std::log2(cfg.p) - std::log2(last_denom) + survival / static_cast<long double>(M_LN2);
  return LogProb::from_log2(lg);
}

LogProb adaptive_cdf(const AttackerConfig& cfg, std::uint64_t a) {
  cfg.validate();
  check_horizon(cfg, a);
  if (cfg.p == 0.0L) return LogProb::zero();
  const long double q = kappa_ratio(cfg);
  const long double t = q == 0.0L
                            ? static_cast<long double>(a) * std::log1p(-cfg.p)
                            : ln_survival(cfg.p, q, a);
  const long double u = -std::expm1(t);
  if (u >= 1.0L) return LogProb::one();
  if (u <= 0.0L) return LogProb::zero();
  return LogProb::from_log2(std::log(u) / static_cast<long double>(M_LN2));
}

long double pmf_ratio(const AttackerConfig& cfg, std::uint64_t a) {
  cfg.validate();
  check_horizon(cfg, a);
  const long double q = kappa_ratio(cfg);
  if (q == 0.0L) return 1.0L;
  long double ln_sum = 0.0L;
  for (std::uint64_t j = 1; j < a; ++j) {
    const long double num = 1.0L - static_cast<long double>(j) * q;
    const long double den =
        1.0L - (static_cast<long double>(j) - 1.0L) * q / (1.0L - cfg.p);
    if (num <= 0.0L || den <= 0.0L) throw std::domain_error("pmf_ratio: term outside (0,1]");
    ln_sum += std::log(num) - std::log(den);
  }
  return std::exp(ln_sum);
}

LogProb adaptive_cdf_shifted_product(const AttackerConfig& cfg, std::uint64_t a) {
  cfg.validate();
  check_horizon(cfg, a);
  if (cfg.p == 0.0L) return LogProb::zero();
  const long double q = kappa_ratio(cfg);
  // sum_{i=1}^{a} p/(1-(i-1)q) * prod_{j=1}^{i+2} (1-p-jq)/(1-jq)
  long double prod = 1.0L;
  for (unsigned j = 1; j <= 3; ++j)
    prod *= (1.0L - cfg.p - j * q) / (1.0L - j * q);
  long double sum = 0.0L, comp = 0.0L;
  for (std::uint64_t i = 1; i <= a; ++i) {
    const long double denom = 1.0L - (static_cast<long double>(i) - 1.0L) * q;
    if (denom <= 0.0L) throw std::domain_error("adaptive_cdf_shifted_product: horizon overflow");
    const long double term = cfg.p / denom * prod;
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    const long double j = static_cast<long double>(i) + 3.0L;
    prod *= (1.0L - cfg.p - j * q) / (1.0L - j * q);
  }
  return LogProb::from_linear(std::min(sum, 1.0L));
}

CdfRatioReport cdf_ratio(const SystemParams& params, const BigInt& kappa, std::uint64_t a) {
  params.validate();
  // p = N V_eps: every enrolled ball disjoint, the largest possible union
  const long double p =
      static_cast<long double>(params.users) *
      ball_volume(params.n, params.epsilon).log2.linear();
  AttackerConfig adaptive{params.n, p, kappa};
  AttackerConfig naive{params.n, p, BigInt(0)};
  const long double cdf_adaptive = adaptive_cdf(adaptive, a).linear();
  const long double cdf_naive = adaptive_cdf(naive, a).linear();
  const long double cdf_shifted = adaptive_cdf_shifted_product(adaptive, a).linear();
  if (cdf_naive <= 0.0L || cdf_adaptive <= 0.0L)
    throw std::domain_error("cdf_ratio: degenerate CDF");
  CdfRatioReport r;
  r.adaptive_over_naive = cdf_adaptive / cdf_naive;
  r.naive_over_adaptive = cdf_naive / cdf_adaptive;
  r.shifted_over_naive = cdf_shifted / cdf_naive;
  r.discrepancy = std::fabs(r.adaptive_over_naive - r.shifted_over_naive);
  return r;
}

std::optional<std::uint64_t> median_trials_adaptive(const AttackerConfig& cfg) {
  cfg.validate();
  if (cfg.p <= 0.0L) return std::nullopt;
  const long double q = kappa_ratio(cfg);
  if (q == 0.0L) {
    // geometric closed form: smallest a with 1-(1-p)^a >= 1/2
    const long double a = -static_cast<long double>(M_LN2) / std::log1p(-cfg.p);
    return static_cast<std::uint64_t>(std::ceil(a - 1e-15L));
  }
  const std::uint64_t horizon = cfg.horizon();
  // bracket by doubling on the monotone CDF, then bisect
  std::uint64_t hi = 1;
  const auto cdf = [&](std::uint64_t a) {
    return -std::expm1(ln_survival(cfg.p, q, a));
  };
  while (cdf(hi) < 0.5L) {
    if (hi >= horizon || hi > (std::uint64_t(1) << 62))
      return std::nullopt;  // median beyond the support
    hi = std::min(hi * 2, horizon);
  }
  std::uint64_t lo = hi / 2 + 1;
  if (hi == 1) return 1;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (cdf(mid) >= 0.5L)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace nearcol
