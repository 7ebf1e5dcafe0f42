#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hpsym/logspace.hpp"
#include "oracle_bigint.hpp"

using hpsym::LogAccumulator;
using hpsym::LogReal;
using hpsym::log_binomial;
using hpsym::log_sum_exp;

TEST_CASE("LogReal round-trip across the double range") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mag(-690.0, 690.0);  // |x| in ~[1e-300, 1e300]
  for (int i = 0; i < 2000; ++i) {
    const double x = (rng() & 1 ? 1.0 : -1.0) * std::exp(mag(rng));
    const LogReal lr = LogReal::from_linear(x);
    REQUIRE(lr.to_linear() == Catch::Approx(x).epsilon(1e-15));
  }
  REQUIRE(LogReal::from_linear(0.0).is_zero());
  REQUIRE(LogReal::from_linear(0.0).to_linear() == 0.0);
}

TEST_CASE("zero LogReal compares equal regardless of log_mag") {
  LogReal a = LogReal::zero();
  LogReal b{0, 123.0};
  REQUIRE(a == b);
}

TEST_CASE("log_binomial small exact values") {
  REQUIRE(log_binomial(4, 2).sign == +1);
  REQUIRE(log_binomial(4, 2).log_mag == Catch::Approx(1.791759469228055).epsilon(1e-14));
  REQUIRE(log_binomial(5, 7).is_zero());
  REQUIRE(log_binomial(5, -1).is_zero());
  REQUIRE(log_binomial(0, 0).log_mag == 0.0);
}

TEST_CASE("log_binomial against the big-integer oracle") {
  // frozen value computed with the exact oracle ahead of the build
  REQUIRE(log_binomial(500, 250).log_mag ==
          Catch::Approx(343.2399948784502).epsilon(1e-12));
  for (long n : {30L, 123L, 500L, 1000L, 4321L}) {
    for (long r : {0L, 1L, n / 3, n / 2, n - 1, n}) {
      const double expect = oracle::log_binomial_exact(n, r);
      REQUIRE(log_binomial(n, r).log_mag == Catch::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("log_binomial symmetry is exact") {
  for (long n : {7L, 60L, 501L}) {
    for (long r = 0; r <= n; ++r) {
      REQUIRE(log_binomial(n, r).log_mag == log_binomial(n, n - r).log_mag);
    }
  }
}

TEST_CASE("Pascal identity in linear domain and in exact integers") {
  for (long n = 1; n <= 60; ++n) {
    for (long r = 0; r <= n; ++r) {
      REQUIRE(oracle::binomial_exact(n, r) ==
              oracle::binomial_exact(n - 1, r) + oracle::binomial_exact(n - 1, r - 1));
      const double lhs = log_binomial(n, r).to_linear();
      const double rhs = log_binomial(n - 1, r).to_linear() + log_binomial(n - 1, r - 1).to_linear();
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("log_sum_exp basics") {
  std::vector<LogReal> two = {LogReal::from_log(0.0), LogReal::from_log(0.0)};
  REQUIRE(log_sum_exp(two).log_mag == Catch::Approx(std::log(2.0)).epsilon(1e-15));

  std::vector<LogReal> cancel = {LogReal::from_log(3.5, +1), LogReal::from_log(3.5, -1)};
  REQUIRE(log_sum_exp(cancel).is_zero());

  std::vector<LogReal> empty;
  REQUIRE(log_sum_exp(empty).is_zero());
}

TEST_CASE("log_sum_exp against the arbitrary-precision oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> mag(-600.0, 600.0);
  std::vector<LogReal> terms;
  std::vector<oracle::LogTerm> oterms;
  for (int i = 0; i < 1000; ++i) {
    const int s = (rng() & 1) ? +1 : -1;
    const double m = mag(rng);
    terms.push_back(LogReal::from_log(m, s));
    oterms.push_back({s, m});
  }
  const oracle::bigfloat exact = oracle::sum_exact(oterms);
  const LogReal got = log_sum_exp(terms);
  const double expect_log = static_cast<double>(boost::multiprecision::log(abs(exact)));
  const int expect_sign = exact > 0 ? 1 : -1;
  REQUIRE(got.sign == expect_sign);
  REQUIRE(got.log_mag == Catch::Approx(expect_log).margin(1e-10));
}

TEST_CASE("LogAccumulator matches oracle on 1e4 terms of dynamic range e^700") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(-350.0, 350.0);
  LogAccumulator acc;
  std::vector<oracle::LogTerm> oterms;
  for (int i = 0; i < 10000; ++i) {
    const int s = (rng() & 1) ? +1 : -1;
    const double m = mag(rng);
    acc.push_log(m, s);
    oterms.push_back({s, m});
  }
  const oracle::bigfloat exact = oracle::sum_exact(oterms);
  const LogReal got = acc.finalize();
  REQUIRE(got.sign == (exact > 0 ? 1 : -1));
  REQUIRE(got.log_mag ==
          Catch::Approx(static_cast<double>(boost::multiprecision::log(abs(exact)))).margin(1e-12));
}

TEST_CASE("log_sum_exp permutation invariance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(-200.0, 200.0);
  std::vector<LogReal> terms;
  for (int i = 0; i < 500; ++i) terms.push_back(LogReal::from_log(mag(rng), (rng() & 1) ? 1 : -1));
  const LogReal ref = log_sum_exp(terms);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(terms.begin(), terms.end(), rng);
    const LogReal got = log_sum_exp(terms);
    REQUIRE(got.sign == ref.sign);
    REQUIRE(got.log_mag == Catch::Approx(ref.log_mag).margin(1e-12));
  }
}

TEST_CASE("multiplication and square keep signs straight") {
  const LogReal a = LogReal::from_linear(-3.0);
  const LogReal b = LogReal::from_linear(2.0);
  REQUIRE((a * b).to_linear() == Catch::Approx(-6.0));
  REQUIRE(a.squared().to_linear() == Catch::Approx(9.0));
  REQUIRE((a * LogReal::zero()).is_zero());
}
