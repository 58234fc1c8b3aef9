#include "nearcol/accuracy.hpp"

#include <cmath>

namespace nearcol {

namespace {

void check_rate(const char* name, std::optional<double> v) {
  if (v && (*v < 0.0 || *v > 1.0 || !std::isfinite(*v)))
    throw std::domain_error(std::string(name) + " outside [0,1]");
}

bool matches(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) <= 1e-9 * scale;
}

}  // namespace

AccuracyRates derive_rates(const AccuracyRates& in) {
  check_rate("FMR", in.fmr);
  check_rate("FNMR", in.fnmr);
  check_rate("FTA", in.fta);
  check_rate("FPIR", in.fpir);
  check_rate("FNIR", in.fnir);
  check_rate("FAR", in.far);
  check_rate("FRR", in.frr);

  AccuracyRates out = in;
  if (out.fmr && out.fta) {
    const double far = *out.fmr * (1.0 - *out.fta);
    if (out.far && !matches(*out.far, far))
      throw std::invalid_argument("derive_rates: FAR inconsistent with FMR*(1-FTA)");
    out.far = far;
  }
  if (out.fnmr && out.fta) {
    const double frr = *out.fta + *out.fnmr * (1.0 - *out.fta);
    if (out.frr && !matches(*out.frr, frr))
      throw std::invalid_argument("derive_rates: FRR inconsistent with FTA+FNMR*(1-FTA)");
    out.frr = frr;
  }
  return out;
}

TrialBound outsider_trials_fmr(const std::vector<double>& per_user_fmr) {
  if (per_user_fmr.empty()) throw std::domain_error("outsider_trials_fmr: no users");
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  long double ln_fail = 0.0L;  // ln prod (1 - FMR_i)
  TrialBound b;
  for (double f : per_user_fmr) {
    if (f < 0.0 || f > 0.5)
      throw std::domain_error("outsider_trials_fmr: FMR outside (0, 1/2]");
    if (f == 0.0) {
      b.unbounded = true;
      return b;
    }
    sum += f;
    sum_sq += static_cast<long double>(f) * f;
    ln_fail += std::log1p(static_cast<long double>(-f));
  }
  b.lower_log2 = -std::log2(sum + sum_sq);
  b.upper_log2 = -std::log2(sum);
  // exact geometric median: -ln 2 / ln(1 - p) with p = 1 - prod(1 - FMR_i)
  const long double ln1mp = ln_fail;
  if (ln1mp < 0.0L)
    b.median_log2 = std::log2(static_cast<long double>(M_LN2)) - std::log2(-ln1mp);
  if (b.lower_log2 < 0.0L || b.upper_log2 < 0.0L) {
    b.clipped = true;
    b.lower_log2 = std::max(b.lower_log2, 0.0L);
    b.upper_log2 = std::max(b.upper_log2, 0.0L);
  }
  return b;
}

TrialBound outsider_trials_fpir(double fpir) {
  if (fpir < 0.0 || fpir > 0.5)
    throw std::domain_error("outsider_trials_fpir: FPIR outside (0, 1/2]");
  if (fpir == 0.0) {
    TrialBound b;
    b.unbounded = true;
    return b;
  }
  return outsider_trials_fmr({fpir});
}

TrialBound outsider_trials_far(const std::vector<double>& per_user_far,
                               const std::vector<double>& per_user_fta) {
  if (per_user_far.size() != per_user_fta.size())
    throw std::invalid_argument("outsider_trials_far: size mismatch");
  std::vector<double> fmr(per_user_far.size());
  for (std::size_t i = 0; i < fmr.size(); ++i) {
    if (per_user_fta[i] >= 1.0)
      throw std::domain_error("outsider_trials_far: FTA = 1 leaves no acquisitions");
    fmr[i] = per_user_far[i] / (1.0 - per_user_fta[i]);
  }
  return outsider_trials_fmr(fmr);
}

LogProb near_collision_probability_fmr(double fmr, std::uint64_t n_users) {
  if (fmr < 0.0 || fmr > 1.0) throw std::domain_error("near_collision: FMR outside [0,1]");
  if (n_users < 1) throw std::domain_error("near_collision: N >= 1 required");
  const long double pairs =
      0.5L * static_cast<long double>(n_users) * (static_cast<long double>(n_users) - 1.0L);
  return LogProb::one_minus_pow(LogProb::from_linear(fmr), pairs);
}

std::optional<std::uint64_t> max_database_size(double fmr, SecurityLevel level) {
  if (fmr <= 0.0) return std::nullopt;
  if (fmr >= 1.0) throw std::domain_error("max_database_size: FMR must be < 1");
  if (level.lambda < 2) throw std::domain_error("max_database_size: lambda >= 2 required");
  const long double target = 1.0L / static_cast<long double>(level.lambda);
  const long double ratio = 8.0L * std::log1p(-target) / std::log1p(static_cast<long double>(-fmr));
  std::uint64_t n = static_cast<std::uint64_t>(0.5L * (1.0L + std::sqrt(1.0L + ratio)));
  if (n < 1) n = 1;
  const auto ok = [&](std::uint64_t m) {
    return near_collision_probability_fmr(fmr, m).linear() < target;
  };
  while (n > 1 && !ok(n)) --n;
  while (ok(n + 1)) ++n;
  return n;
}

std::optional<double> max_database_size_asymptotic(double fmr, SecurityLevel level) {
  if (fmr <= 0.0) return std::nullopt;
  if (level.lambda < 2) throw std::domain_error("max_database_size: lambda >= 2 required");
  return std::sqrt(2.0 / (static_cast<double>(level.lambda) * fmr));
}

}  // namespace nearcol
