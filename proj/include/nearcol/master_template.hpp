#pragma once

#include "nearcol/metric_bounds.hpp"

namespace nearcol {

/// Query for a template covering k of the N enrolled templates at once.
struct MasterTemplateQuery {
  SystemParams params;
  std::uint64_t k = 2;

  void validate() const {
    params.validate();
    if (k < 2 || k > params.users)
      throw std::domain_error("MasterTemplateQuery: k outside [2, N]");
  }
};

/// P(some single ball of radius epsilon covers the whole database):
/// V_eps^{N-1} <= P <= V_{2 eps}^{N-1} (2 eps capped at n).
ProbabilityBounds full_master_template_bounds(const SystemParams& params);

/// P(some epsilon-ball covers exactly k enrolled templates and every center
/// covering them excludes the other N-k):
///   C(N,k) V_eps^{k-1} (1 - V_{2eps})^{N-k} <= P <= C(N,k) V_{2eps}^{k-1} (1 - V_eps)^{N-k}
/// An upper bound above 1 is clipped and flagged.
ProbabilityBounds k_master_template_bounds(const MasterTemplateQuery& query);

/// P(exactly k of the other N-1 templates fall within epsilon of a fixed
/// one): the binomial law C(N-1,k) V^k (1-V)^{N-k-1}.
LogProb k_near_collision_probability(const SystemParams& params, std::uint64_t k);

/// P(all N enrolled balls are pairwise disjoint); the weak-NC product bounds
/// at doubled radius.
ProbabilityBounds disjoint_balls_probability_bounds(const SystemParams& params);

}  // namespace nearcol
