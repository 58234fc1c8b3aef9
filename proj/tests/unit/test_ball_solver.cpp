#include "nearcol/ball_solver.hpp"

#include "nearcol/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace nearcol;

namespace {

TemplateDatabase db_from_bits(unsigned n, const std::vector<std::uint32_t>& rows) {
  TemplateDatabase db;
  db.n = n;
  for (std::uint32_t bits : rows) {
    Template t = Template::zeros(n);
    t.words[0] = bits;
    db.templates.push_back(t);
  }
  return db;
}

std::uint32_t low_bits(const Template& t) { return static_cast<std::uint32_t>(t.words[0]); }

/// O(n^2) pairwise-comparison partition: same class iff columns equal or
/// complementary, closed transitively.
std::vector<std::vector<unsigned>> partition_by_pairs(const TemplateDatabase& db) {
  const unsigned n = db.n;
  const std::size_t count = db.templates.size();
  std::vector<unsigned> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  std::function<unsigned(unsigned)> find = [&](unsigned x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  const auto column = [&](unsigned coord) {
    std::vector<bool> c(count);
    for (std::size_t i = 0; i < count; ++i) c[i] = db.templates[i].get(coord);
    return c;
  };
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = a + 1; b < n; ++b) {
      const auto ca = column(a), cb = column(b);
      bool equal = true, compl_ = true;
      for (std::size_t i = 0; i < count; ++i) {
        equal = equal && ca[i] == cb[i];
        compl_ = compl_ && ca[i] != cb[i];
      }
      if (equal || compl_) parent[find(a)] = find(b);
    }
  std::map<unsigned, std::vector<unsigned>> groups;
  for (unsigned c = 0; c < n; ++c) groups[find(c)].push_back(c);
  std::vector<std::vector<unsigned>> classes;
  for (auto& [root, coords] : groups) classes.push_back(coords);
  std::sort(classes.begin(), classes.end());
  return classes;
}

std::uint64_t brute_force_intersection_count(const TemplateDatabase& db, unsigned eps) {
  std::uint64_t count = 0;
  for (std::uint32_t p = 0; p < (std::uint32_t(1) << db.n); ++p) {
    bool inside = true;
    for (const auto& t : db.templates)
      if (std::popcount(p ^ low_bits(t)) > static_cast<int>(eps)) {
        inside = false;
        break;
      }
    count += inside;
  }
  return count;
}

}  // namespace

TEST_CASE("column partition degenerate cases") {
  {
    const auto classes = column_partition(db_from_bits(9, {0x155}));
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].size() == 9);
  }
  {
    const auto classes = column_partition(db_from_bits(7, {0x2A, 0x2A, 0x2A}));
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].size() == 7);
  }
}

TEST_CASE("column partition matches the pairwise-comparison oracle") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TemplateDatabase db = generate_database(12, 4, seed);
    auto got = column_partition(db);
    std::sort(got.begin(), got.end());
    CHECK(got == partition_by_pairs(db));
  }
}

TEST_CASE("linear system on tiny databases") {
  {
    const auto sys = build_linear_system(db_from_bits(6, {0x15}), 2);
    REQUIRE(sys.sign_matrix.size() == 1);
    REQUIRE(sys.sign_matrix[0].size() == 1);
    CHECK(sys.sign_matrix[0][0] == 1);
    CHECK(sys.slack == std::vector<long long>{2});
  }
  {
    // two templates at distance 3
    const auto sys = build_linear_system(db_from_bits(8, {0x00, 0x07}), 2);
    CHECK(sys.slack == std::vector<long long>{2, -1});
  }
}

TEST_CASE("membership through the linear system equals direct distances") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const TemplateDatabase db = generate_database(12, 3, seed);
    const unsigned eps = 3;
    const auto sys = build_linear_system(db, eps);
    const Template& v0 = db.templates[0];
    for (std::uint32_t p = 0; p < (1u << 12); ++p) {
      std::vector<unsigned> p_vec(sys.classes.size());
      for (std::size_t k = 0; k < sys.classes.size(); ++k) {
        unsigned diff = 0;
        for (unsigned coord : sys.classes[k])
          diff += (((p >> coord) & 1u) != static_cast<unsigned>(v0.get(coord)));
        p_vec[k] = diff;
      }
      bool direct = true;
      for (const auto& t : db.templates)
        direct = direct && std::popcount(p ^ low_bits(t)) <= static_cast<int>(eps);
      // P components above the caps cannot correspond to admitted vectors
      bool in_space = true;
      for (std::size_t k = 0; k < p_vec.size(); ++k) in_space = in_space && p_vec[k] <= sys.caps[k];
      CHECK(direct == (in_space && sys.admits(p_vec)));
    }
  }
}

TEST_CASE("intersection cardinality: closed cases and oracles") {
  {
    const TemplateDatabase solo = db_from_bits(10, {0x2A});
    CHECK(intersection_cardinality(solo, 3) == partial_binomial_sum(10, 3));
  }
  {
    // pair at distance d against the two-ball measure
    for (unsigned d : {0u, 1u, 3u, 6u}) {
      const TemplateDatabase pair = db_from_bits(11, {0, (1u << d) - 1});
      const BigRat measure = intersection_measure(11, 2, d).value;
      CHECK(BigRat(intersection_cardinality(pair, 2), BigInt(1) << 11) == measure);
    }
  }
  for (std::uint64_t seed = 40; seed < 48; ++seed) {
    const TemplateDatabase db = generate_database(14, 3, seed);
    CHECK(intersection_cardinality(db, 4) == brute_force_intersection_count(db, 4));
  }
}

TEST_CASE("cardinality is monotone in epsilon") {
  const TemplateDatabase db = generate_database(12, 4, 9);
  BigInt prev = 0;
  for (unsigned eps = 0; eps <= 12; ++eps) {
    const BigInt card = intersection_cardinality(db, eps);
    CHECK(card >= prev);
    prev = card;
  }
  CHECK(prev == BigInt(1) << 12);  // eps = n covers everything
}

TEST_CASE("cardinality does not depend on the reference template") {
  const TemplateDatabase db = generate_database(12, 4, 21);
  const unsigned eps = 4;
  const BigInt base = intersection_cardinality(db, eps);
  for (std::size_t v0 = 1; v0 < db.templates.size(); ++v0) {
    // rotate the database so template v0 leads
    TemplateDatabase rotated = db;
    std::rotate(rotated.templates.begin(), rotated.templates.begin() + v0,
                rotated.templates.end());
    CHECK(intersection_cardinality(rotated, eps) == base);
  }
}

TEST_CASE("enumerate_intersection materializes exactly the members") {
  {
    const TemplateDatabase solo = db_from_bits(9, {0x99});
    const auto members = enumerate_intersection(solo, 0);
    REQUIRE(members.size() == 1);
    CHECK(low_bits(members[0]) == 0x99);
  }
  {
    const TemplateDatabase far_pair = db_from_bits(10, {0x000, 0x3FF});
    CHECK(enumerate_intersection(far_pair, 3).empty());
  }
  for (std::uint64_t seed = 70; seed < 76; ++seed) {
    const TemplateDatabase db = generate_database(12, 3, seed);
    const auto members = enumerate_intersection(db, 3);
    CHECK(BigInt(members.size()) == intersection_cardinality(db, 3));
    std::set<std::uint32_t> got;
    for (const auto& m : members) got.insert(low_bits(m));
    CHECK(got.size() == members.size());
    std::set<std::uint32_t> expect;
    for (std::uint32_t p = 0; p < (1u << 12); ++p) {
      bool inside = true;
      for (const auto& t : db.templates)
        inside = inside && std::popcount(p ^ low_bits(t)) <= 3;
      if (inside) expect.insert(p);
    }
    CHECK(got == expect);
  }
}

TEST_CASE("cardinal reduction ratio") {
  {
    const auto sys = build_linear_system(db_from_bits(9, {0x00}), 2);
    CHECK(static_cast<double>(cardinal_reduction_ratio(sys).linear()) ==
          doctest::Approx(512.0 / 10.0));
  }
  {
    // n singleton classes: no reduction
    const TemplateDatabase db = db_from_bits(4, {0x0, 0x5, 0x3, 0xE});
    const auto sys = build_linear_system(db, 2);
    if (sys.classes.size() == 4)
      CHECK(static_cast<double>(cardinal_reduction_ratio(sys).linear()) == doctest::Approx(1.0));
  }
  for (std::uint64_t seed = 3; seed < 9; ++seed) {
    const TemplateDatabase db = generate_database(16, 3, seed);
    const auto sys = build_linear_system(db, 5);
    long double p_space = 0.0L;
    for (unsigned cap : sys.caps) p_space += std::log2(static_cast<long double>(cap) + 1.0L);
    const long double actual_ratio = 16.0L - p_space;
    CHECK(cardinal_reduction_ratio(sys).log2_value() <= actual_ratio + 1e-9L);
  }
}

TEST_CASE("budget guard refuses oversized enumerations") {
  const TemplateDatabase db = generate_database(24, 5, 5);
  CHECK_THROWS_AS(intersection_cardinality(db, 8, 1000), BudgetError);
}

TEST_CASE("partition size pmf: base cases and normalization") {
  {
    const auto pmf = partition_size_pmf(1, 3);
    REQUIRE(pmf.size() == 1);
    CHECK(pmf[0] == doctest::Approx(1.0));
  }
  for (unsigned n : {4u, 16u, 40u, 64u})
    for (unsigned users : {1u, 2u, 5u, 16u}) {
      const auto pmf = partition_size_pmf(n, users);
      long double total = 0.0L;
      for (double v : pmf) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(static_cast<double>(total) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("partition size pmf equals the composition sum") {
  for (unsigned n : {2u, 5u, 9u, 12u})
    for (unsigned users : {2u, 3u, 6u}) {
      const auto dp = partition_size_pmf(n, users);
      const auto direct = partition_size_pmf_simplex(n, users);
      REQUIRE(dp.size() == direct.size());
      for (std::size_t i = 0; i < dp.size(); ++i)
        CHECK(dp[i] == doctest::Approx(direct[i]).epsilon(1e-12));
    }
}

TEST_CASE("the proof-display factor variant is a genuine mismatch") {
  const auto dp = partition_size_pmf(8, 3);
  const auto off = partition_size_pmf_simplex(8, 3, true);
  // each entry is scaled by an extra (1 - i/2^{N-1}) survival factor
  for (std::size_t i = 0; i < dp.size(); ++i) {
    const double factor = 1.0 - std::ldexp(static_cast<double>(i + 1), -2);
    CHECK(off[i] == doctest::Approx(dp[i] * factor).epsilon(1e-9));
  }
}

TEST_CASE("stirling bounds sandwich the pmf") {
  for (auto [n, users] : std::vector<std::pair<unsigned, unsigned>>{{8, 3}, {20, 5}, {12, 4}}) {
    const auto pmf = partition_size_pmf(n, users);
    for (unsigned i = 1; i <= n; ++i) {
      const auto b = partition_size_bounds(n, users, i);
      const double lo = static_cast<double>(b.lower.linear());
      const double hi = static_cast<double>(b.upper.linear());
      CHECK(lo <= pmf[i - 1] * (1 + 1e-9) + 1e-300);
      CHECK(pmf[i - 1] <= hi * (1 + 1e-9) + 1e-300);
      // the lower bound is in fact the exact law
      CHECK(pmf[i - 1] == doctest::Approx(lo).epsilon(1e-9));
    }
  }
  {
    // i = n: both Stirling factors collapse to the bare survival product
    const auto b = partition_size_bounds(6, 4, 6);
    long double survival = 1.0L;
    for (unsigned j = 1; j <= 6; ++j)
      survival *= 1.0L - std::ldexp(static_cast<long double>(j - 1), -3);
    CHECK(static_cast<double>(b.lower.linear()) ==
          doctest::Approx(static_cast<double>(survival)).epsilon(1e-12));
    CHECK(static_cast<double>(b.upper.linear()) ==
          doctest::Approx(static_cast<double>(survival)).epsilon(1e-12));
  }
}
