#include "nearcol/metric_bounds.hpp"

#include <cmath>

namespace nearcol {

namespace {

constexpr long double kLn2 = M_LN2;

long double log2_ln2() { return std::log2(kLn2); }

long double log2_u64(std::uint64_t v) { return std::log2(static_cast<long double>(v)); }

/// prod_{j=1}^{users} (1 - (j-1) v + C(j-1,2) corr), factors clamped into [0,1].
/// corr = 0 gives the survival product behind the weak-NC upper bound (= S1).
long double clamped_product(std::uint64_t users, long double v, long double corr) {
  if (users <= 1) return 1.0L;
  const long double m = static_cast<long double>(users - 1);
  if (corr == 0.0L && m * v < 1e-6L) {
    // all factors are within 1e-6 of 1; three Taylor terms of sum log1p(-(j-1)v)
    // keep the absolute error below ~1e-9 up to users ~ 2^31
    const long double s1 = 0.5L * m * (m + 1.0L);
    const long double s2 = m * (m + 1.0L) * (2.0L * m + 1.0L) / 6.0L;
    const long double s3 = s1 * s1;
    return std::exp(-v * s1 - 0.5L * v * v * s2 - v * v * v * s3 / 3.0L);
  }
  long double ln_sum = 0.0L;
  for (std::uint64_t j = 1; j <= users; ++j) {
    const long double jm1 = static_cast<long double>(j - 1);
    long double term = 1.0L - jm1 * v + 0.5L * jm1 * (jm1 - 1.0L) * corr;
    if (term <= 0.0L) return 0.0L;
    if (term > 1.0L) term = 1.0L;
    ln_sum += std::log(term);
    if (ln_sum < -45.0L) return std::exp(ln_sum);  // remaining factors only shrink it
  }
  return std::exp(ln_sum);
}

void clip(MetricBound& b) {
  if (b.lower_log2 < 0.0L) {
    b.lower_log2 = 0.0L;
    b.clipped_lower = true;
  }
  if (b.upper_valid && b.upper_log2 < 0.0L) {
    b.upper_log2 = 0.0L;
    b.clipped_upper = true;
  }
}

struct EntropyContext {
  long double h;      // h(eps/n)
  long double n_cap;  // n (1 - h)
  long double ratio;  // eps/n
};

EntropyContext entropy_context(const SystemParams& p) {
  const long double r = static_cast<long double>(p.epsilon) / p.n;
  const long double h = binary_entropy(r);
  return EntropyContext{h, p.n * (1.0L - h), r};
}

/// log2(N_max - 1) of the weak-NC lower-bound validity condition.
long double log2_nmax_minus_one(const SystemParams& p, const EntropyContext& ctx) {
  const long double r = ctx.ratio;
  const unsigned c = (p.epsilon + 2) / 2;  // ceil((eps+1)/2)
  return -static_cast<long double>(p.epsilon) + c * std::log2((1.0L - r) / r) -
         0.5L * std::log2(8.0L * p.epsilon * (1.0L - r));
}

std::vector<ValidityFlag> weak_nc_validity(const SystemParams& p, const EntropyContext& ctx) {
  std::vector<ValidityFlag> flags;
  const bool half = 2 * p.epsilon < p.n;
  flags.push_back({"epsilon_ratio_below_half", half});
  flags.push_back({"per_term_upper_below_one", half && log2_u64(p.users) < ctx.n_cap});
  bool below_nmax = false;
  bool lower_lt_one = false;
  if (half && p.epsilon >= 1) {
    below_nmax = p.users <= 1 ||
                 std::log2(static_cast<long double>(p.users) - 1.0L) <
                     log2_nmax_minus_one(p, ctx);
    lower_lt_one = p.n * (1.0L - 2.0L * ctx.h) >
                   2.0L * std::log2(3.0L) - static_cast<long double>(p.epsilon);
  }
  flags.push_back({"users_below_lower_cap", below_nmax});
  flags.push_back({"lower_bound_below_one", lower_lt_one});
  flags.push_back({"lower_monotone_regime", below_nmax && lower_lt_one});
  return flags;
}

}  // namespace

LogProb strong_nc_probability(const SystemParams& params) {
  params.validate();
  if (params.users == 1) return LogProb::zero();
  const LogProb v = ball_volume(params.n, params.epsilon).log2;
  return LogProb::one_minus_pow(v, static_cast<long double>(params.users - 1));
}

MetricBound outsider_bounds(const SystemParams& params, BoundForm form) {
  params.validate();
  const EntropyContext ctx = entropy_context(params);
  MetricBound b;
  b.rounding = Rounding::Floor;
  b.validity.push_back({"epsilon_ratio_at_most_half", 2 * params.epsilon <= params.n});
  b.validity.push_back({"users_below_entropy_cap", log2_u64(params.users) < ctx.n_cap - 1.0L});
  const long double lg_users = log2_u64(params.users);
  if (form == BoundForm::ExactVolume) {
    const long double mlg_v = -ball_volume(params.n, params.epsilon).log2.log2_value();
    b.lower_log2 = log2_ln2() - 1.0L - lg_users + mlg_v;
    b.upper_log2 = log2_ln2() - lg_users + mlg_v;
  } else {
    const long double spread =
        params.epsilon == 0 ? 0.0L
                            : 0.5L * std::log2(params.epsilon * (1.0L - ctx.ratio));
    b.lower_log2 = ctx.n_cap - lg_users;
    b.upper_log2 = ctx.n_cap + spread - lg_users;
  }
  clip(b);
  return b;
}

MetricBound outsider_bounds_distinct(const SystemParams& params, BoundForm form) {
  MetricBound b = outsider_bounds(params, form);
  // dependence correction for databases of pairwise-distinct templates
  const long double x = std::ldexp(static_cast<long double>(params.users - 1),
                                   -(static_cast<int>(params.n) + 1));
  b.lower_log2 -= std::log2(1.0L + 6.0L * x);
  b.upper_log2 -= std::log2(1.0L + x);
  clip(b);
  return b;
}

ProbabilityBounds weak_nc_probability_bounds(const SystemParams& params) {
  params.validate();
  const EntropyContext ctx = entropy_context(params);
  ProbabilityBounds out;
  out.validity = weak_nc_validity(params, ctx);
  const long double v = ball_volume(params.n, params.epsilon).log2.linear();
  long double corr = 0.0L;
  if (params.epsilon + 1 <= params.n)
    corr = intersection_measure(params.n, params.epsilon, params.epsilon + 1).log2.linear();
  const long double surv_upper = clamped_product(params.users, v, 0.0L);
  const long double surv_lower = clamped_product(params.users, v, corr);
  out.upper = LogProb::from_linear(1.0L - surv_upper);
  out.lower = LogProb::from_linear(1.0L - surv_lower);
  return out;
}

MetricBound insider_bounds(const SystemParams& params, BoundForm form) {
  SystemParams all = params;
  all.ell = params.users;
  return insider_bounds_subset(all, form);
}

MetricBound insider_bounds_subset(const SystemParams& params, BoundForm form) {
  params.validate();
  const std::uint64_t ell = params.ell.value_or(params.users);
  const EntropyContext ctx = entropy_context(params);
  MetricBound b;
  b.rounding = Rounding::Nearest;
  b.validity.push_back({"epsilon_ratio_at_most_half", 2 * params.epsilon <= params.n});
  if (params.users < 2) {
    b.validity.push_back({"at_least_two_users", false});
    b.upper_valid = false;
    return b;
  }
  const long double lg_users = log2_u64(params.users);
  const long double lg_ell = log2_u64(ell);
  const long double lg_um1 = std::log2(static_cast<long double>(params.users) - 1.0L);
  if (form == BoundForm::ExactVolume) {
    const ExactProb vol = ball_volume(params.n, params.epsilon);
    b.lower_log2 =
        log2_ln2() - vol.log2.log2_value() - (lg_ell + lg_users + lg_um1);
    BigRat denom = vol.value;
    if (params.epsilon + 1 <= params.n) {
      denom -= BigRat(params.users - 2) *
               intersection_measure(params.n, params.epsilon, params.epsilon + 1).value / 2;
    }
    const bool denom_ok = denom > 0;
    b.validity.push_back({"upper_denominator_positive", denom_ok});
    if (denom_ok) {
      b.upper_log2 = log2_ln2() - (lg_ell + lg_um1) - log2_rational(denom);
    } else {
      b.upper_valid = false;
      b.upper_log2 = 0.0L;
    }
  } else {
    const long double alpha = params.alpha.value_or(0.0);
    b.lower_log2 = ctx.n_cap - (lg_ell + lg_users + lg_um1);
    b.upper_log2 = ctx.n_cap + params.n * alpha - (lg_ell + lg_um1);
    const auto amin = min_feasible_alpha(params);
    b.validity.push_back(
        {"alpha_size_condition", amin.has_value() && alpha >= *amin - 1e-12L});
  }
  clip(b);
  return b;
}

std::optional<double> min_feasible_alpha(const SystemParams& params) {
  params.validate();
  if (params.epsilon < 1 || 2 * params.epsilon >= params.n) return std::nullopt;
  const EntropyContext ctx = entropy_context(params);
  const long double r = ctx.ratio;
  const unsigned c = (params.epsilon + 2) / 2;  // ceil((eps+1)/2)
  // feasibility: 2^{-n alpha} <= 1/sqrt(8 eps (1-r)) - (N-2) 2^eps (r/(1-r))^c
  const long double base = 1.0L / std::sqrt(8.0L * params.epsilon * (1.0L - r));
  long double rhs = base;
  if (params.users > 2) {
    const long double lg_term = static_cast<long double>(params.epsilon) +
                                c * std::log2(r / (1.0L - r)) +
                                std::log2(static_cast<long double>(params.users) - 2.0L);
    rhs -= std::exp2(lg_term);
  }
  if (rhs <= 0.0L) return std::nullopt;
  const long double alpha = std::max(-std::log2(rhs) / params.n, 0.0L);
  if (alpha >= ctx.h) return std::nullopt;
  return static_cast<double>(alpha);
}

double s1_score(unsigned n, std::uint64_t users, unsigned epsilon) {
  const long double v = ball_volume(n, epsilon).log2.linear();
  return static_cast<double>(clamped_product(users, v, 0.0L));
}

SecurityScores security_scores(const SystemParams& params) {
  params.validate();
  SecurityScores s;
  const long double v = ball_volume(params.n, params.epsilon).log2.linear();
  s.s1 = static_cast<double>(clamped_product(params.users, v, 0.0L));
  const MetricBound out = outsider_bounds(params, BoundForm::Entropy);
  const MetricBound ins = insider_bounds(params, BoundForm::Entropy);
  s.s2_raw = out.lower_log2 - 128.0L;
  s.s3_raw = ins.lower_log2 - 128.0L;
  s.s2_table = out.lower_display() - 128;
  s.s3_table = ins.lower_display() - 128;
  s.validity = out.validity;
  for (const auto& f : ins.validity) s.validity.push_back(f);
  return s;
}

std::optional<unsigned> max_epsilon_for_robustness(unsigned n, std::uint64_t users) {
  if (s1_score(n, users, 0) < 0.5) return std::nullopt;
  unsigned lo = 0, hi = n;  // s1 is nonincreasing in epsilon
  while (lo < hi) {
    const unsigned mid = lo + (hi - lo + 1) / 2;
    if (s1_score(n, users, mid) >= 0.5)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

std::optional<unsigned> min_dimension_for_robustness(unsigned epsilon, std::uint64_t users) {
  const unsigned start = std::max(epsilon, 1u);
  const unsigned cap = 1u << 16;
  unsigned hi = start;
  while (hi < cap && s1_score(hi, users, epsilon) < 0.5) hi *= 2;
  if (s1_score(hi, users, epsilon) < 0.5) return std::nullopt;
  unsigned lo = start;  // s1 is nondecreasing in n
  while (lo < hi) {
    const unsigned mid = lo + (hi - lo) / 2;
    if (s1_score(mid, users, epsilon) >= 0.5)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::optional<std::uint64_t> max_users_for_robustness(unsigned epsilon, unsigned n) {
  if (s1_score(n, 1, epsilon) < 0.5) return std::nullopt;
  const std::uint64_t cap = std::uint64_t(1) << 31;
  std::uint64_t hi = 2;
  while (hi < cap && s1_score(n, hi, epsilon) >= 0.5) hi *= 2;
  std::uint64_t lo = hi / 2, top = std::min(hi, cap);  // s1 is nonincreasing in N
  while (lo < top) {
    const std::uint64_t mid = lo + (top - lo + 1) / 2;
    if (s1_score(n, mid, epsilon) >= 0.5)
      lo = mid;
    else
      top = mid - 1;
  }
  return lo;
}

}  // namespace nearcol
