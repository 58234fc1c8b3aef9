#pragma once

#include "nearcol/combinatorics.hpp"
#include "nearcol/template_db.hpp"

#include <cstdint>
#include <functional>

namespace nearcol {

/// Resource-budget violation; log2_size reports the size of the search space
/// that was refused.
struct BudgetError : std::runtime_error {
  long double log2_size;
  BudgetError(const std::string& msg, long double lg) : std::runtime_error(msg), log2_size(lg) {}
};

/// The column-partition representation of a database: coordinates fall into
/// the same class when their database columns are equal or complementary.
/// Relative to a reference template v0, every template then agrees with v0
/// on all coordinates of a class or disagrees on all of them, which turns
/// multi-ball membership into a small integer linear system:
///   p is within epsilon of every v_i  <=>  A P <= slack
/// where P_k = d(p, v0) restricted to class k.
struct PartitionSystem {
  std::vector<std::vector<unsigned>> classes;  // disjoint, covering 0..n-1
  std::vector<std::vector<int>> sign_matrix;   // N rows, one +1/-1 per class
  std::vector<long long> slack;                // epsilon - d(v_i, v0)
  std::size_t reference_index = 0;
  unsigned epsilon = 0;
  std::vector<unsigned> caps;                  // min(epsilon, |I_k|)

  /// log2 of |P-space| = prod (caps[k] + 1).
  long double log2_p_space() const;

  bool admits(const std::vector<unsigned>& p_vec) const;
};

/// Finest partition of the coordinate set under column equality/complement.
/// Classes appear in order of their smallest coordinate.
std::vector<std::vector<unsigned>> column_partition(const TemplateDatabase& db);

PartitionSystem build_linear_system(const TemplateDatabase& db, unsigned epsilon,
                                    std::size_t v0_index = 0);

/// Exact |intersection of the epsilon-balls around all templates|, by
/// enumerating the P-space and weighting admitted vectors with binomials.
/// Throws BudgetError when |P-space| exceeds the budget.
BigInt intersection_cardinality(const TemplateDatabase& db, unsigned epsilon,
                                std::uint64_t budget = 100'000'000);

/// Materializes every template within epsilon of all database entries.
/// max_results also caps the output itself (the intersection can be huge).
std::vector<Template> enumerate_intersection(const TemplateDatabase& db, unsigned epsilon,
                                             std::uint64_t budget = 100'000'000,
                                             std::uint64_t max_results = 1'000'000);

/// Lower bound on |Z_2^n| / |P-space|: prod_k 2^{|I_k|} / (|I_k| + 1).
LogProb cardinal_reduction_ratio(const PartitionSystem& system);

/// Distribution of the number of partition classes for a uniform random
/// database (N templates), computed by the column-append Markov chain:
/// appending a column keeps the class count j with probability j / 2^{N-1}.
/// Entry [i-1] holds P(K0 = i) for i = 1..n.
std::vector<double> partition_size_pmf(unsigned n, unsigned n_templates);

/// Direct evaluation as a sum over compositions (exponential; n <= 24).
/// With proof_display_factor the per-path survival factor product runs one
/// index further (1-j/2^{N-1}, j = 1..i), which disagrees with the chain
/// transitions; kept only to exhibit that discrepancy.
std::vector<double> partition_size_pmf_simplex(unsigned n, unsigned n_templates,
                                               bool proof_display_factor = false);

/// Stirling-number bounds on P(K0 = i); lower is in fact exact.
struct PartitionSizeBounds {
  LogProb lower;
  LogProb upper;
};
PartitionSizeBounds partition_size_bounds(unsigned n, unsigned n_templates, unsigned i);

}  // namespace nearcol
