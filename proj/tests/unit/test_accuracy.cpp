#include "nearcol/accuracy.hpp"

#include <doctest.h>

#include <cmath>

using namespace nearcol;

TEST_CASE("derive_rates fills the two identities") {
  AccuracyRates in;
  in.fmr = 0.01;
  in.fta = 0.0;
  CHECK(*derive_rates(in).far == doctest::Approx(0.01));

  AccuracyRates frr_in;
  frr_in.fnmr = 0.02;
  frr_in.fta = 0.1;
  CHECK(*derive_rates(frr_in).frr == doctest::Approx(0.118));

  AccuracyRates degenerate;
  degenerate.fmr = 0.5;
  degenerate.fta = 1.0;
  CHECK(*derive_rates(degenerate).far == 0.0);

  AccuracyRates inconsistent;
  inconsistent.fmr = 0.01;
  inconsistent.fta = 0.0;
  inconsistent.far = 0.02;
  CHECK_THROWS_AS(derive_rates(inconsistent), std::invalid_argument);
  inconsistent.far = 0.01;  // consistent over-specification is fine
  CHECK_NOTHROW(derive_rates(inconsistent));

  AccuracyRates bad;
  bad.fmr = 1.5;
  CHECK_THROWS_AS(derive_rates(bad), std::domain_error);
}

TEST_CASE("outsider trials from FMR reproduce the published rows") {
  {
    const TrialBound b = outsider_trials_fmr(std::vector<double>(8, 1e-6));
    CHECK(std::floor(b.lower_log2) == 16);
    CHECK(std::floor(b.upper_log2) == 16);
  }
  {
    const TrialBound b = outsider_trials_fmr({0.5});
    CHECK(static_cast<double>(b.upper_log2) == doctest::Approx(1.0));
  }
  {
    const TrialBound b = outsider_trials_fmr(std::vector<double>(100, 1e-4));
    CHECK(static_cast<double>(b.lower_log2) == doctest::Approx(6.64).epsilon(1e-3));
    CHECK(static_cast<double>(b.upper_log2) == doctest::Approx(6.64).epsilon(1e-3));
  }
  CHECK(outsider_trials_fmr({1e-6, 0.0}).unbounded);
  CHECK_THROWS_AS(outsider_trials_fmr({0.6}), std::domain_error);
}

TEST_CASE("trial bounds bracket the exact geometric median") {
  // the bound exponents follow the table convention (no ln 2); the median
  // inequality they come from carries the ln 2 factor, restored here
  const long double c = std::log2(static_cast<long double>(M_LN2));
  for (double fmr : {1e-6, 1e-4, 1e-2, 0.2, 0.5})
    for (std::size_t users : {1u, 3u, 10u, 100u}) {
      if (fmr * static_cast<double>(users) > 1e3) continue;
      const TrialBound b = outsider_trials_fmr(std::vector<double>(users, fmr));
      REQUIRE(b.median_log2.has_value());
      if (!b.clipped) {
        CHECK(b.lower_log2 + c <= *b.median_log2 + 1e-12L);
        CHECK(*b.median_log2 <= b.upper_log2 + c + 1e-12L);
      }
    }
}

TEST_CASE("outsider trials from FPIR") {
  CHECK(static_cast<double>(outsider_trials_fpir(0.5).upper_log2) == doctest::Approx(1.0));
  {
    const TrialBound b = outsider_trials_fpir(std::exp2(-20.0));
    CHECK(static_cast<double>(b.upper_log2) == doctest::Approx(20.0));
    CHECK(static_cast<double>(20.0L - b.lower_log2) == doctest::Approx(1.3756e-6).epsilon(1e-3));
  }
  {
    const TrialBound b = outsider_trials_fpir(1e-3);
    CHECK(static_cast<double>(b.upper_log2) == doctest::Approx(9.9658).epsilon(1e-4));
    CHECK(static_cast<double>(b.lower_log2) == doctest::Approx(9.9643).epsilon(1e-4));
  }
  CHECK(outsider_trials_fpir(0.0).unbounded);
}

TEST_CASE("outsider trials from FAR and FTA") {
  {
    // FTA = 0 reduces to the FMR form
    const TrialBound via_far = outsider_trials_far({1e-4, 2e-4}, {0.0, 0.0});
    const TrialBound via_fmr = outsider_trials_fmr({1e-4, 2e-4});
    CHECK(via_far.lower_log2 == via_fmr.lower_log2);
    CHECK(via_far.upper_log2 == via_fmr.upper_log2);
  }
  {
    const TrialBound b = outsider_trials_far({5e-7}, {0.5});
    CHECK(static_cast<double>(b.upper_log2) == doctest::Approx(19.9316).epsilon(1e-4));
  }
  {
    const TrialBound b =
        outsider_trials_far(std::vector<double>(10, 1e-6), std::vector<double>(10, 0.9));
    CHECK(static_cast<double>(b.upper_log2) == doctest::Approx(13.2877).epsilon(1e-4));
  }
  CHECK_THROWS_AS(outsider_trials_far({1e-6}, {1.0}), std::domain_error);
}

TEST_CASE("near-collision probability") {
  CHECK(near_collision_probability_fmr(0.3, 1).is_zero());
  CHECK(static_cast<double>(near_collision_probability_fmr(2e-6, 7).linear()) ==
        doctest::Approx(4.2e-5).epsilon(1e-3));
  CHECK(static_cast<double>(near_collision_probability_fmr(1e-4, 100).linear()) ==
        doctest::Approx(0.3904442).epsilon(1e-6));
}

TEST_CASE("maximum database size matches the published caps") {
  const SecurityLevel lam100{100};
  CHECK(*max_database_size(1e-6, lam100) == 142);
  CHECK(*max_database_size(2e-6, lam100) == 100);
  CHECK(*max_database_size(0.04, lam100) == 1);
  CHECK(!max_database_size(0.0, lam100).has_value());
  CHECK_THROWS_AS(max_database_size(1e-6, SecurityLevel{1}), std::domain_error);
}

TEST_CASE("maximum database size is maximal and monotone") {
  double prev_by_fmr = 1e18;
  for (double fmr : {1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
    double prev_by_lambda = 1e18;
    for (std::uint64_t lambda : {2ull, 8ull, 32ull, 128ull, 512ull, 1024ull}) {
      const SecurityLevel level{lambda};
      const std::uint64_t n = *max_database_size(fmr, level);
      const double target = 1.0 / static_cast<double>(lambda);
      CHECK(static_cast<double>(near_collision_probability_fmr(fmr, n).linear()) < target);
      CHECK(static_cast<double>(near_collision_probability_fmr(fmr, n + 1).linear()) >= target);
      CHECK(static_cast<double>(n) <= prev_by_lambda);
      prev_by_lambda = static_cast<double>(n);
      if (lambda == 128) {
        CHECK(static_cast<double>(n) <= prev_by_fmr);
        prev_by_fmr = static_cast<double>(n);
      }
    }
  }
}

TEST_CASE("asymptotic size approximation") {
  // within one user at the published operating points
  for (double fmr : {1e-6, 2e-6, 5e-6, 1e-5, 1e-4}) {
    const SecurityLevel level{100};
    const double exact = static_cast<double>(*max_database_size(fmr, level));
    const double approx = *max_database_size_asymptotic(fmr, level);
    CHECK(std::fabs(exact - approx) <= 1.0 + 1e-9);
  }
  // in general the gap scales with sqrt(-lambda ln(1 - 1/lambda)); 3% covers
  // every lambda >= 10
  for (double fmr : {1e-8, 1e-6, 1e-4, 1e-3})
    for (std::uint64_t lambda : {10ull, 100ull, 1000ull}) {
      const SecurityLevel level{lambda};
      const double exact = static_cast<double>(*max_database_size(fmr, level));
      const double approx = *max_database_size_asymptotic(fmr, level);
      CHECK(std::fabs(exact - approx) <= 1.0 + 0.03 * approx);
    }
  CHECK(*max_database_size_asymptotic(2e-6, SecurityLevel{100}) == doctest::Approx(100.0));
  CHECK(*max_database_size_asymptotic(5e-6, SecurityLevel{100}) ==
        doctest::Approx(63.2456).epsilon(1e-4));
  CHECK(!max_database_size_asymptotic(0.0, SecurityLevel{100}).has_value());
}
