#include "nearcol/master_template.hpp"

#include <cmath>

namespace nearcol {

namespace {

LogProb volume_log(unsigned n, unsigned epsilon) {
  return ball_volume(n, std::min(epsilon, n)).log2;
}

}  // namespace

ProbabilityBounds full_master_template_bounds(const SystemParams& params) {
  params.validate();
  ProbabilityBounds out;
  const long double m = static_cast<long double>(params.users) - 1.0L;
  out.lower = volume_log(params.n, params.epsilon).pow(m);
  out.upper = volume_log(params.n, 2 * params.epsilon).pow(m);
  return out;
}

ProbabilityBounds k_master_template_bounds(const MasterTemplateQuery& query) {
  query.validate();
  const SystemParams& p = query.params;
  ProbabilityBounds out;
  const LogProb v_eps = volume_log(p.n, p.epsilon);
  const LogProb v_2eps = volume_log(p.n, 2 * p.epsilon);
  const LogProb choose =
      LogProb::from_ratio(binomial(static_cast<unsigned>(p.users),
                                   static_cast<unsigned>(query.k)),
                          BigInt(1));
  const long double rest = static_cast<long double>(p.users - query.k);
  const long double covered = static_cast<long double>(query.k) - 1.0L;
  out.lower = choose * v_eps.pow(covered) * v_2eps.complement().pow(rest);
  out.upper = choose * v_2eps.pow(covered) * v_eps.complement().pow(rest);
  if (out.upper.log2_value() > 0.0L) {
    out.upper = LogProb::one();
    out.validity.push_back({"upper_clipped_at_one", false});
  }
  return out;
}

LogProb k_near_collision_probability(const SystemParams& params, std::uint64_t k) {
  params.validate();
  if (k > params.users - 1)
    throw std::domain_error("k_near_collision_probability: k outside [0, N-1]");
  const LogProb v = volume_log(params.n, params.epsilon);
  const LogProb choose = LogProb::from_ratio(
      binomial(static_cast<unsigned>(params.users - 1), static_cast<unsigned>(k)),
      BigInt(1));
  return choose * v.pow(static_cast<long double>(k)) *
         v.complement().pow(static_cast<long double>(params.users - 1 - k));
}

ProbabilityBounds disjoint_balls_probability_bounds(const SystemParams& params) {
  params.validate();
  const unsigned wide = std::min(2 * params.epsilon, params.n);
  SystemParams doubled = params;
  doubled.epsilon = wide;
  ProbabilityBounds weak = weak_nc_probability_bounds(doubled);
  ProbabilityBounds out;
  out.validity = std::move(weak.validity);
  // disjointness is the absence of a weak collision at radius 2 eps
  out.lower = weak.upper.complement();
  out.upper = weak.lower.complement();
  return out;
}

}  // namespace nearcol
