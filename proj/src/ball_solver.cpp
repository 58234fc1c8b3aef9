#include "nearcol/ball_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nearcol {

long double PartitionSystem::log2_p_space() const {
  long double lg = 0.0L;
  for (unsigned c : caps) lg += std::log2(static_cast<long double>(c) + 1.0L);
  return lg;
}

bool PartitionSystem::admits(const std::vector<unsigned>& p_vec) const {
  for (std::size_t i = 0; i < sign_matrix.size(); ++i) {
    long long dot = 0;
    for (std::size_t k = 0; k < p_vec.size(); ++k)
      dot += sign_matrix[i][k] * static_cast<long long>(p_vec[k]);
    if (dot > slack[i]) return false;
  }
  return true;
}

std::vector<std::vector<unsigned>> column_partition(const TemplateDatabase& db) {
  db.validate();
  if (db.templates.empty()) throw std::domain_error("column_partition: empty database");
  const std::size_t n_templates = db.templates.size();
  const std::size_t key_words = (n_templates + 63) / 64;
  std::map<std::vector<std::uint64_t>, std::size_t> class_of;
  std::vector<std::vector<unsigned>> classes;
  std::vector<std::uint64_t> key(key_words);
  for (unsigned coord = 0; coord < db.n; ++coord) {
    std::fill(key.begin(), key.end(), 0);
    for (std::size_t i = 0; i < n_templates; ++i)
      if (db.templates[i].get(coord)) key[i / 64] |= std::uint64_t(1) << (i % 64);
    // canonical form: complement the column when its first bit is set,
    // so equal-or-complementary columns share a key
    if (key[0] & 1u) {
      for (std::size_t w = 0; w < key_words; ++w) key[w] = ~key[w];
      const unsigned tail = n_templates % 64;
      if (tail) key[key_words - 1] &= (std::uint64_t(1) << tail) - 1;
    }
    auto [it, inserted] = class_of.try_emplace(key, classes.size());
    if (inserted) classes.emplace_back();
    classes[it->second].push_back(coord);
  }
  return classes;
}

PartitionSystem build_linear_system(const TemplateDatabase& db, unsigned epsilon,
                                    std::size_t v0_index) {
  db.validate();
  if (v0_index >= db.templates.size())
    throw std::domain_error("build_linear_system: reference index out of range");
  PartitionSystem sys;
  sys.classes = column_partition(db);
  sys.reference_index = v0_index;
  sys.epsilon = epsilon;
  const Template& v0 = db.templates[v0_index];
  const std::size_t n_templates = db.templates.size();
  const std::size_t n_classes = sys.classes.size();
  sys.sign_matrix.assign(n_templates, std::vector<int>(n_classes, 0));
  sys.slack.resize(n_templates);
  sys.caps.resize(n_classes);
  for (std::size_t k = 0; k < n_classes; ++k)
    sys.caps[k] = std::min<unsigned>(epsilon, static_cast<unsigned>(sys.classes[k].size()));
  for (std::size_t i = 0; i < n_templates; ++i) {
    const Template& vi = db.templates[i];
    sys.slack[i] = static_cast<long long>(epsilon) -
                   static_cast<long long>(hamming_distance(vi, v0));
    for (std::size_t k = 0; k < n_classes; ++k) {
      unsigned diff = 0;
      for (unsigned coord : sys.classes[k]) diff += vi.get(coord) != v0.get(coord);
      if (diff == 0) {
        sys.sign_matrix[i][k] = 1;
      } else if (diff == sys.classes[k].size()) {
        sys.sign_matrix[i][k] = -1;
      } else {
        // impossible for the finest equal-or-complement partition
        throw std::logic_error("build_linear_system: class dichotomy violated");
      }
    }
  }
  return sys;
}

namespace {

/// Iterates all P vectors (odometer order) keeping per-row dot products
/// incrementally; calls visit(P) for admitted vectors.
void for_each_admitted(const PartitionSystem& sys,
                       const std::function<void(const std::vector<unsigned>&)>& visit) {
  const std::size_t n_classes = sys.caps.size();
  const std::size_t n_rows = sys.sign_matrix.size();
  std::vector<unsigned> p(n_classes, 0);
  std::vector<long long> dot(n_rows, 0);
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < n_rows; ++i)
      if (dot[i] > sys.slack[i]) {
        ok = false;
        break;
      }
    if (ok) visit(p);
    // advance odometer
    std::size_t k = 0;
    while (k < n_classes) {
      if (p[k] < sys.caps[k]) {
        ++p[k];
        for (std::size_t i = 0; i < n_rows; ++i) dot[i] += sys.sign_matrix[i][k];
        break;
      }
      for (std::size_t i = 0; i < n_rows; ++i)
        dot[i] -= sys.sign_matrix[i][k] * static_cast<long long>(p[k]);
      p[k] = 0;
      ++k;
    }
    if (k == n_classes) return;
  }
}

void check_budget(const PartitionSystem& sys, std::uint64_t budget) {
  const long double lg = sys.log2_p_space();
  if (lg > std::log2(static_cast<long double>(budget)))
    throw BudgetError("P-space larger than enumeration budget", lg);
}

}  // namespace

BigInt intersection_cardinality(const TemplateDatabase& db, unsigned epsilon,
                                std::uint64_t budget) {
  const PartitionSystem sys = build_linear_system(db, epsilon, 0);
  check_budget(sys, budget);
  // binomial weights per class and count
  std::vector<std::vector<BigInt>> weights(sys.classes.size());
  for (std::size_t k = 0; k < sys.classes.size(); ++k) {
    const unsigned sz = static_cast<unsigned>(sys.classes[k].size());
    for (unsigned c = 0; c <= sys.caps[k]; ++c) weights[k].push_back(binomial(sz, c));
  }
  BigInt total = 0;
  for_each_admitted(sys, [&](const std::vector<unsigned>& p) {
    BigInt prod = 1;
    for (std::size_t k = 0; k < p.size(); ++k) prod *= weights[k][p[k]];
    total += prod;
  });
  return total;
}

std::vector<Template> enumerate_intersection(const TemplateDatabase& db, unsigned epsilon,
                                             std::uint64_t budget,
                                             std::uint64_t max_results) {
  const PartitionSystem sys = build_linear_system(db, epsilon, 0);
  check_budget(sys, budget);
  const Template& v0 = db.templates[sys.reference_index];
  std::vector<Template> out;

  // enumerate the subsets of each class matching the admitted counts
  std::function<void(const std::vector<unsigned>&, std::size_t, Template&)> expand =
      [&](const std::vector<unsigned>& p, std::size_t k, Template& current) {
        if (k == p.size()) {
          if (out.size() >= max_results)
            throw BudgetError("intersection larger than result cap",
                              std::log2(static_cast<long double>(max_results)));
          out.push_back(current);
          return;
        }
        const auto& coords = sys.classes[k];
        const unsigned take = p[k];
        std::vector<unsigned> pick(take);
        std::function<void(unsigned, unsigned)> choose = [&](unsigned start, unsigned got) {
          if (got == take) {
            for (unsigned c : pick) current.set(c, !v0.get(c));
            expand(p, k + 1, current);
            for (unsigned c : pick) current.set(c, v0.get(c));
            return;
          }
          for (unsigned idx = start; idx + (take - got) <= coords.size(); ++idx) {
            pick[got] = coords[idx];
            choose(idx + 1, got + 1);
          }
        };
        choose(0, 0);
      };

  for_each_admitted(sys, [&](const std::vector<unsigned>& p) {
    Template current = v0;
    expand(p, 0, current);
  });
  return out;
}

LogProb cardinal_reduction_ratio(const PartitionSystem& sys) {
  long double lg = 0.0L;
  for (const auto& cls : sys.classes)
    lg += static_cast<long double>(cls.size()) -
          std::log2(static_cast<long double>(cls.size()) + 1.0L);
  return LogProb::from_log2(lg);
}

std::vector<double> partition_size_pmf(unsigned n, unsigned n_templates) {
  if (n < 1 || n_templates < 1) throw std::domain_error("partition_size_pmf: bad parameters");
  // stay probability with j classes present: j / 2^{N-1}
  const auto stay = [&](unsigned j) {
    return std::ldexp(static_cast<long double>(j), -static_cast<int>(n_templates - 1));
  };
  std::vector<long double> cur(n + 1, 0.0L);
  cur[1] = 1.0L;  // the first column always opens one class
  for (unsigned step = 1; step < n; ++step) {
    std::vector<long double> next(n + 1, 0.0L);
    for (unsigned j = 1; j <= step && j <= n; ++j) {
      if (cur[j] == 0.0L) continue;
      const long double s = stay(j);
      next[j] += cur[j] * s;
      if (j + 1 <= n) next[j + 1] += cur[j] * (1.0L - s);
    }
    cur = std::move(next);
  }
  std::vector<double> pmf(n);
  for (unsigned i = 1; i <= n; ++i) pmf[i - 1] = static_cast<double>(cur[i]);
  return pmf;
}

std::vector<double> partition_size_pmf_simplex(unsigned n, unsigned n_templates,
                                               bool proof_display_factor) {
  if (n > 24) throw std::domain_error("partition_size_pmf_simplex: n too large");
  const auto stay = [&](unsigned j) {
    return std::ldexp(static_cast<long double>(j), -static_cast<int>(n_templates - 1));
  };
  std::vector<double> pmf(n, 0.0);
  for (unsigned i = 1; i <= n; ++i) {
    long double survival = 1.0L;
    for (unsigned j = 1; j <= i; ++j)
      survival *= 1.0L - stay(proof_display_factor ? j : j - 1);
    long double sum = 0.0L;
    // sum over compositions (n_1..n_i) >= 0 with sum = n - i of prod j^{n_j} s_j^{n_j}
    std::function<void(unsigned, unsigned, long double)> rec =
        [&](unsigned j, unsigned left, long double acc) {
          if (j == i) {
            long double tail = acc;
            for (unsigned t = 0; t < left; ++t) tail *= stay(i);
            sum += tail;
            return;
          }
          long double acc_j = acc;
          for (unsigned take = 0; take <= left; ++take) {
            rec(j + 1, left - take, acc_j);
            acc_j *= stay(j);
          }
        };
    rec(1, n - i, 1.0L);
    pmf[i - 1] = static_cast<double>(survival * sum);
  }
  return pmf;
}

PartitionSizeBounds partition_size_bounds(unsigned n, unsigned n_templates, unsigned i) {
  if (i < 1 || i > n) throw std::domain_error("partition_size_bounds: i outside [1,n]");
  long double lg = log2_bigint(stirling2(n, i)) -
                   static_cast<long double>(n_templates - 1) * (n - i);
  for (unsigned j = 1; j <= i; ++j) {
    const long double survive =
        1.0L - std::ldexp(static_cast<long double>(j - 1),
                          -static_cast<int>(n_templates - 1));
    if (survive <= 0.0L) return {LogProb::zero(), LogProb::zero()};
    lg += std::log2(survive);
  }
  PartitionSizeBounds b;
  b.lower = LogProb::from_log2(lg);
  b.upper = LogProb::from_log2(lg + (n - i) * std::log2(static_cast<long double>(i)));
  return b;
}

}  // namespace nearcol
