#include "nearcol/adaptive.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace nearcol;

namespace {

/// Exact first-success law of the urn process: population M, s winning
/// states, kappa losing states removed per failure. Pure rational
/// arithmetic, no closed form.
std::vector<BigRat> urn_pmf(std::uint64_t population, std::uint64_t winners,
                            std::uint64_t kappa, std::uint64_t trials) {
  std::vector<BigRat> pmf;
  BigRat alive = 1;
  BigInt pool = population;
  for (std::uint64_t a = 1; a <= trials; ++a) {
    pmf.push_back(alive * BigRat(winners, pool));
    const BigInt losers = pool - winners;
    if (losers < kappa) {
      alive = 0;
      break;
    }
    alive *= BigRat(losers, pool);
    pool -= kappa;
  }
  return pmf;
}

AttackerConfig config(unsigned n, long double p, std::uint64_t kappa) {
  AttackerConfig c;
  c.n = n;
  c.p = p;
  c.kappa = kappa;
  return c;
}

}  // namespace

TEST_CASE("first trial succeeds with probability p for every kappa") {
  for (std::uint64_t kappa : {0ull, 1ull, 4ull, 1024ull}) {
    const AttackerConfig c = config(12, 64.0L / 4096.0L, kappa);
    CHECK(static_cast<double>(adaptive_pmf(c, 1).linear()) ==
          doctest::Approx(64.0 / 4096.0).epsilon(1e-15));
  }
}

TEST_CASE("kappa = 0 is the geometric law") {
  const long double p = 0.01L;
  const AttackerConfig c = config(16, p, 0);
  for (std::uint64_t a : {1ull, 2ull, 10ull, 100ull}) {
    const long double expect = p * std::pow(1.0L - p, static_cast<long double>(a - 1));
    CHECK(static_cast<double>(adaptive_pmf(c, a).linear()) ==
          doctest::Approx(static_cast<double>(expect)).epsilon(1e-12));
    const long double cdf = -std::expm1(static_cast<long double>(a) * std::log1p(-p));
    CHECK(static_cast<double>(adaptive_cdf(c, a).linear()) ==
          doctest::Approx(static_cast<double>(cdf)).epsilon(1e-12));
    CHECK(pmf_ratio(c, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("pmf matches the exact urn law") {
  const auto exact = urn_pmf(4096, 64, 4, 50);
  const AttackerConfig c = config(12, 64.0L / 4096.0L, 4);
  for (std::uint64_t a = 1; a <= 50; ++a) {
    const double reference =
        boost::multiprecision::numerator(exact[a - 1]).convert_to<double>() /
        boost::multiprecision::denominator(exact[a - 1]).convert_to<double>();
    CHECK(static_cast<double>(adaptive_pmf(c, a).linear()) ==
          doctest::Approx(reference).epsilon(1e-9));
  }
}

TEST_CASE("pmf normalizes over the whole support") {
  const AttackerConfig c = config(12, 64.0L / 4096.0L, 4);
  const std::uint64_t horizon = c.horizon();
  CHECK(horizon == 1009);
  long double total = 0.0L;
  for (std::uint64_t a = 1; a <= horizon; ++a) total += adaptive_pmf(c, a).linear();
  CHECK(static_cast<double>(total) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(static_cast<double>(adaptive_cdf(c, horizon).linear()) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(adaptive_pmf(c, horizon + 1), std::domain_error);
}

TEST_CASE("cdf is monotone and consistent with the pmf sum") {
  const AttackerConfig c = config(12, 64.0L / 4096.0L, 4);
  long double running = 0.0L;
  long double prev = 0.0L;
  for (std::uint64_t a = 1; a <= 200; ++a) {
    running += adaptive_pmf(c, a).linear();
    const long double cdf = adaptive_cdf(c, a).linear();
    CHECK(cdf >= prev);
    CHECK(static_cast<double>(cdf) == doctest::Approx(static_cast<double>(running)).epsilon(1e-12));
    prev = cdf;
  }
}

TEST_CASE("pmf ratio agrees with the direct quotient") {
  const AttackerConfig adaptive = config(12, 1.0L / 64.0L, 4);
  const AttackerConfig naive = config(12, 1.0L / 64.0L, 0);
  for (std::uint64_t a : {1ull, 5ull, 10ull}) {
    const long double direct =
        adaptive_pmf(naive, a).linear() / adaptive_pmf(adaptive, a).linear();
    CHECK(static_cast<double>(pmf_ratio(adaptive, a)) ==
          doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
  }
  CHECK(pmf_ratio(adaptive, 1) == 1.0L);
}

TEST_CASE("median trials") {
  CHECK(*median_trials_adaptive(config(10, 0.5L, 0)) == 1);
  CHECK(*median_trials_adaptive(config(20, 1e-3L, 0)) == 693);
  const auto naive = median_trials_adaptive(config(12, 1.0L / 64.0L, 0));
  const auto adaptive = median_trials_adaptive(config(12, 1.0L / 64.0L, 4));
  REQUIRE(naive.has_value());
  REQUIRE(adaptive.has_value());
  CHECK(std::llabs(static_cast<long long>(*naive) - static_cast<long long>(*adaptive)) <= 1);
  // aggressive elimination: the pool empties and success is forced at the
  // horizon, which becomes the median
  const auto forced = median_trials_adaptive(config(8, 1.0L / 4096.0L, 64));
  REQUIRE(forced.has_value());
  CHECK(*forced == config(8, 1.0L / 4096.0L, 64).horizon());
  // a success probability of zero has no median at all
  CHECK(!median_trials_adaptive(config(8, 0.0L, 4)).has_value());
}

TEST_CASE("huge kappa values stay exact") {
  // kappa = 2^100 on a 128-bit universe: only kappa/2^n reaches floats
  const AttackerConfig c = config(128, 1e-3L, 0);
  AttackerConfig big = c;
  big.kappa = BigInt(1) << 100;
  const long double lemma = adaptive_cdf(big, 1000).linear();
  const long double geometric = adaptive_cdf(c, 1000).linear();
  CHECK(static_cast<double>(lemma / geometric) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(big.horizon() > 1000);
}

TEST_CASE("published ratio cells come from the shifted-product variant") {
  SystemParams p;
  p.n = 128;
  p.users = 1000000;
  p.epsilon = 30;
  const CdfRatioReport r = cdf_ratio(p, BigInt(1) << 47, 1000);
  CHECK(static_cast<double>(r.shifted_over_naive) == doctest::Approx(0.9981).epsilon(5e-4));
  // the lemma-form CDF sees no measurable adaptive advantage here
  CHECK(static_cast<double>(r.adaptive_over_naive) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.discrepancy > 1e-4L);
  CHECK(static_cast<double>(r.naive_over_adaptive) == doctest::Approx(1.0).epsilon(1e-6));
}
