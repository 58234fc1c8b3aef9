#include "nearcol/simulate.hpp"

#include "nearcol/ball_solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

namespace nearcol {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::domain_error("Rng::below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t v = next();
    if (v < limit) return v % bound;
  }
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NEARCOL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

namespace {

Template random_template(Rng& rng, unsigned n) {
  Template t = Template::zeros(n);
  for (auto& w : t.words) w = rng.next();
  const unsigned tail = n % 64;
  if (tail) t.words.back() &= (std::uint64_t(1) << tail) - 1;
  return t;
}

/// results[i] = fn(i) over any worker layout; outcome order is by index.
template <typename Fn>
std::vector<Outcome> run_replicas(std::uint64_t replicas, unsigned workers, Fn&& fn) {
  std::vector<Outcome> results(replicas);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < replicas; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::thread> pool;
  std::uint64_t chunk = (replicas + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min(replicas, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::uint64_t i = lo; i < hi; ++i) results[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace

void SimulationReport::finalize_counts() {
  replicas = outcomes.size();
  censored_count = 0;
  std::vector<std::uint64_t> values;
  values.reserve(outcomes.size());
  long double sum = 0.0L;
  for (const auto& o : outcomes) {
    if (o.censored) {
      ++censored_count;
    } else {
      values.push_back(o.value);
      sum += static_cast<long double>(o.value);
    }
  }
  empirical_mean.reset();
  empirical_median.reset();
  if (!values.empty()) empirical_mean = static_cast<double>(sum / values.size());
  // the median is identified only when censoring cannot hide it
  if (values.size() * 2 > outcomes.size() && !outcomes.empty()) {
    std::sort(values.begin(), values.end());
    const std::size_t half = outcomes.size() / 2;  // rank among all replicas
    if (half < values.size()) {
      if (outcomes.size() % 2 == 1) {
        empirical_median = static_cast<double>(values[half]);
      } else if (half > 0) {
        empirical_median =
            0.5 * (static_cast<double>(values[half - 1]) + static_cast<double>(values[half]));
      }
    }
  }
}

std::string SimulationReport::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["seed"] = seed;
  j["replicas"] = replicas;
  j["censored"] = censored_count;
  if (empirical_median) j["empirical_median"] = *empirical_median;
  if (empirical_mean) j["empirical_mean"] = *empirical_mean;
  if (empirical_frequency) {
    j["empirical_frequency"] = *empirical_frequency;
    j["frequency_sigma"] = frequency_sigma.value_or(0.0);
    j["frequency_trials"] = frequency_trials;
    j["frequency_successes"] = frequency_successes;
  }
  for (const auto& [k, v] : extras) j[k] = v;
  nlohmann::ordered_json outs = nlohmann::ordered_json::array();
  for (const auto& o : outcomes) {
    if (o.censored)
      outs.push_back(nullptr);
    else
      outs.push_back(o.value);
  }
  j["outcomes"] = std::move(outs);
  return j.dump();
}

void SimulationReport::write_csv(std::ostream& out) const {
  out << "replica,value,censored\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    out << i << ',' << outcomes[i].value << ',' << (outcomes[i].censored ? 1 : 0) << '\n';
}

TemplateDatabase generate_database(unsigned n, std::uint64_t n_templates,
                                   std::uint64_t seed, bool distinct) {
  if (n < 1) throw std::domain_error("generate_database: n >= 1 required");
  if (distinct && n < 64 && n_templates > (std::uint64_t(1) << n))
    throw std::domain_error("generate_database: more distinct templates than points");
  Rng rng(seed, 0);
  TemplateDatabase db;
  db.n = n;
  db.templates.reserve(n_templates);
  for (std::uint64_t i = 0; i < n_templates; ++i) {
    Template t = random_template(rng, n);
    if (distinct) {
      bool dup = true;
      while (dup) {
        dup = false;
        for (const auto& prev : db.templates)
          if (prev == t) {
            dup = true;
            t = random_template(rng, n);
            break;
          }
      }
    }
    db.templates.push_back(std::move(t));
  }
  return db;
}

namespace {

bool within_any(const Template& guess, const std::vector<Template>& templates,
                unsigned epsilon, std::size_t skip = SIZE_MAX) {
  for (std::size_t i = 0; i < templates.size(); ++i) {
    if (i == skip) continue;
    if (hamming_distance(guess, templates[i]) <= epsilon) return true;
  }
  return false;
}

}  // namespace

SimulationReport simulate_outsider(unsigned n, std::uint64_t n_templates, unsigned epsilon,
                                   std::uint64_t seed, std::uint64_t max_trials,
                                   std::uint64_t replicas, unsigned workers) {
  if (max_trials < 1) throw std::domain_error("simulate_outsider: max_trials >= 1");
  SimulationReport rep;
  rep.kind = "outsider";
  rep.seed = seed;
  rep.outcomes = run_replicas(replicas, resolve_workers(workers), [&](std::uint64_t r) {
    Rng rng(seed, r);
    std::vector<Template> db;
    db.reserve(n_templates);
    for (std::uint64_t i = 0; i < n_templates; ++i) db.push_back(random_template(rng, n));
    for (std::uint64_t trial = 1; trial <= max_trials; ++trial) {
      if (within_any(random_template(rng, n), db, epsilon)) return Outcome{trial, false};
    }
    return Outcome{max_trials, true};
  });
  rep.finalize_counts();
  // per-trial success rate: each replica contributes (trials-1) failures + 1 success
  std::uint64_t trials = 0, successes = 0;
  for (const auto& o : rep.outcomes) {
    trials += o.value;
    successes += o.censored ? 0 : 1;
  }
  rep.frequency_trials = trials;
  rep.frequency_successes = successes;
  if (trials > 0) {
    const double f = static_cast<double>(successes) / static_cast<double>(trials);
    rep.empirical_frequency = f;
    rep.frequency_sigma = std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
  }
  return rep;
}

SimulationReport simulate_adaptive(unsigned universe_log2, std::uint64_t success_states,
                                   std::uint64_t kappa, std::uint64_t seed,
                                   std::uint64_t replicas, std::uint64_t max_trials,
                                   unsigned workers) {
  if (universe_log2 < 1 || universe_log2 > 62)
    throw std::domain_error("simulate_adaptive: universe_log2 outside [1, 62]");
  const std::uint64_t universe = std::uint64_t(1) << universe_log2;
  if (success_states > universe)
    throw std::domain_error("simulate_adaptive: more successes than states");
  SimulationReport rep;
  rep.kind = "adaptive";
  rep.seed = seed;
  std::uint64_t exhausted = 0;
  rep.outcomes = run_replicas(replicas, resolve_workers(workers), [&](std::uint64_t r) {
    Rng rng(seed, r);
    std::uint64_t population = universe;
    for (std::uint64_t trial = 1; trial <= max_trials; ++trial) {
      if (rng.below(population) < success_states) return Outcome{trial, false};
      const std::uint64_t failure_states = population - success_states;
      if (failure_states < kappa || population == kappa)
        return Outcome{trial, true};  // urn exhausted
      population -= kappa;
    }
    return Outcome{max_trials, true};
  });
  rep.finalize_counts();
  for (const auto& o : rep.outcomes) exhausted += o.censored ? 1 : 0;
  rep.extras.emplace_back("exhausted_or_capped", static_cast<double>(exhausted));
  return rep;
}

SimulationReport simulate_insider(unsigned n, std::uint64_t n_templates, unsigned epsilon,
                                  std::uint64_t ell, std::uint64_t seed,
                                  std::uint64_t max_rounds, InsiderMode mode,
                                  std::uint64_t replicas, unsigned workers) {
  if (ell < 1 || ell > n_templates)
    throw std::domain_error("simulate_insider: ell outside [1, N]");
  SimulationReport rep;
  rep.kind = mode == InsiderMode::Redraw ? "insider-redraw" : "insider-fixed";
  rep.seed = seed;
  std::vector<std::uint64_t> rounds_played(replicas, 0);
  std::vector<std::uint64_t> round0_hits(replicas, 0);
  rep.outcomes = run_replicas(replicas, resolve_workers(workers), [&](std::uint64_t r) {
    Rng rng(seed, r);
    std::vector<Template> db;
    db.reserve(n_templates);
    const auto draw_db = [&] {
      db.clear();
      for (std::uint64_t i = 0; i < n_templates; ++i) db.push_back(random_template(rng, n));
    };
    const auto has_weak_nc = [&] {
      for (std::size_t i = 0; i < db.size(); ++i)
        for (std::size_t j = i + 1; j < db.size(); ++j)
          if (hamming_distance(db[i], db[j]) <= epsilon) return true;
      return false;
    };
    draw_db();
    if (has_weak_nc()) {
      round0_hits[r] = 1;
      return Outcome{0, false};
    }
    if (n_templates < 2) return Outcome{max_rounds, true};  // nobody to impersonate
    for (std::uint64_t round = 1; round <= max_rounds; ++round) {
      if (mode == InsiderMode::Redraw && round > 1) {
        // fresh collision-free database, matching the independent-rounds law
        unsigned attempts = 0;
        do {
          if (++attempts > 100000)
            throw std::runtime_error("simulate_insider: cannot draw a collision-free database");
          draw_db();
        } while (has_weak_nc());
      }
      ++rounds_played[r];
      for (std::uint64_t attacker = 0; attacker < ell; ++attacker) {
        const Template guess = random_template(rng, n);
        if (within_any(guess, db, epsilon, attacker)) return Outcome{round, false};
      }
    }
    return Outcome{max_rounds, true};
  });
  rep.finalize_counts();
  std::uint64_t rounds = 0, hits = 0, round0 = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    rounds += rounds_played[r];
    round0 += round0_hits[r];
    if (!rep.outcomes[r].censored && rep.outcomes[r].value > 0) ++hits;
  }
  rep.frequency_trials = rounds;
  rep.frequency_successes = hits;
  if (rounds > 0) {
    const double f = static_cast<double>(hits) / static_cast<double>(rounds);
    rep.empirical_frequency = f;
    rep.frequency_sigma = std::sqrt(f * (1.0 - f) / static_cast<double>(rounds));
  }
  rep.extras.emplace_back("round0_frequency",
                          replicas ? static_cast<double>(round0) / replicas : 0.0);
  rep.extras.emplace_back("round0_successes", static_cast<double>(round0));
  return rep;
}

WeakNcScan brute_force_weak_nc(const TemplateDatabase& db, unsigned epsilon) {
  db.validate();
  WeakNcScan scan;
  for (std::size_t i = 0; i < db.templates.size(); ++i)
    for (std::size_t j = i + 1; j < db.templates.size(); ++j)
      if (hamming_distance(db.templates[i], db.templates[j]) <= epsilon) {
        scan.found = true;
        scan.pairs.emplace_back(i, j);
      }
  return scan;
}

bool brute_force_multi_nc(const TemplateDatabase& db, unsigned epsilon, unsigned m,
                          std::uint64_t max_nodes) {
  db.validate();
  if (m < 2) throw std::domain_error("brute_force_multi_nc: m >= 2 required");
  const std::size_t count = db.templates.size();
  if (m > count) return false;
  // adjacency of the epsilon-closeness graph
  std::vector<std::vector<bool>> adj(count, std::vector<bool>(count, false));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j)
      if (hamming_distance(db.templates[i], db.templates[j]) <= epsilon)
        adj[i][j] = adj[j][i] = true;
  std::uint64_t nodes = 0;
  std::vector<std::size_t> clique;
  std::function<bool(std::size_t)> extend = [&](std::size_t start) -> bool {
    if (clique.size() == m) return true;
    if (++nodes > max_nodes)
      throw BudgetError("clique search budget exceeded",
                        std::log2(static_cast<long double>(max_nodes)));
    for (std::size_t cand = start; cand < count; ++cand) {
      if (count - cand < m - clique.size()) return false;  // not enough left
      bool fits = true;
      for (std::size_t member : clique)
        if (!adj[member][cand]) {
          fits = false;
          break;
        }
      if (!fits) continue;
      clique.push_back(cand);
      if (extend(cand + 1)) return true;
      clique.pop_back();
    }
    return false;
  };
  return extend(0);
}

}  // namespace nearcol
