#pragma once

#include "nearcol/template_db.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nearcol {

/// Counter-based splittable generator (SplitMix64 output function).
/// Stream derivation rule: the stream for replica r under master seed s
/// starts from state mix64(s + mix64(r + 1)); draws are sequential within
/// the stream. Streams depend only on (seed, replica), never on the worker
/// layout, so any parallel schedule reproduces identical outcomes.
std::uint64_t mix64(std::uint64_t x);

class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t stream_index)
      : state_(mix64(master_seed + mix64(stream_index + 1))) {}

  std::uint64_t next();
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound), unbiased
  double unit();                             // uniform in [0, 1)

 private:
  std::uint64_t state_;
};

struct Outcome {
  std::uint64_t value = 0;  // trial / round count, or 0/1 for boolean events
  bool censored = false;
};

/// Deterministic record of one simulation run. Rebuilding with the same seed
/// and replica count reproduces the outcome list bit for bit.
struct SimulationReport {
  std::string kind;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
  std::vector<Outcome> outcomes;

  std::uint64_t censored_count = 0;
  std::optional<double> empirical_median;  // reported only if >50% uncensored
  std::optional<double> empirical_mean;    // over uncensored replicas
  std::optional<double> empirical_frequency;
  std::optional<double> frequency_sigma;   // binomial sigma of the frequency
  std::uint64_t frequency_trials = 0;
  std::uint64_t frequency_successes = 0;
  /// extra named statistics, serialized in insertion order
  std::vector<std::pair<std::string, double>> extras;

  void finalize_counts();   // fills censored_count / median / mean from outcomes
  std::string to_json() const;
  void write_csv(std::ostream& out) const;
};

/// N uniform templates; with distinct set, rejection-resamples duplicates.
TemplateDatabase generate_database(unsigned n, std::uint64_t n_templates,
                                   std::uint64_t seed, bool distinct = false);

/// Untargeted outsider: per replica, draw a database and guess uniformly
/// until within epsilon of some enrolled template (censored at max_trials).
SimulationReport simulate_outsider(unsigned n, std::uint64_t n_templates, unsigned epsilon,
                                   std::uint64_t seed, std::uint64_t max_trials,
                                   std::uint64_t replicas, unsigned workers = 1);

/// Exact urn model of the adaptive attacker: universe 2^n, success_states
/// winning states; every failure removes kappa losing states.
SimulationReport simulate_adaptive(unsigned universe_log2, std::uint64_t success_states,
                                   std::uint64_t kappa, std::uint64_t seed,
                                   std::uint64_t replicas, std::uint64_t max_trials,
                                   unsigned workers = 1);

enum class InsiderMode { Redraw, FixedDb };

/// Multi-insider rounds. Round 0 succeeds when the enrolled templates already
/// contain a weak near-collision; afterwards each of ell attackers draws one
/// fresh guess per round against the other N-1 enrolled templates.
/// Redraw resamples a collision-free database every round (the independent-
/// rounds abstraction); FixedDb keeps the initial database.
SimulationReport simulate_insider(unsigned n, std::uint64_t n_templates, unsigned epsilon,
                                  std::uint64_t ell, std::uint64_t seed,
                                  std::uint64_t max_rounds, InsiderMode mode,
                                  std::uint64_t replicas, unsigned workers = 1);

/// Exact O(N^2) scan for pairs within epsilon.
struct WeakNcScan {
  bool found = false;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};
WeakNcScan brute_force_weak_nc(const TemplateDatabase& db, unsigned epsilon);

/// True iff m templates exist that are pairwise within epsilon (exact clique
/// search with pruning; throws BudgetError past max_nodes expansions).
bool brute_force_multi_nc(const TemplateDatabase& db, unsigned epsilon, unsigned m,
                          std::uint64_t max_nodes = 10'000'000);

/// Worker count resolution: explicit value, else NEARCOL_THREADS, else 1.
unsigned resolve_workers(unsigned requested = 0);

}  // namespace nearcol
