#include <doctest.h>

#include <cmath>
#include <vector>

#include "branchtail/distributions.hpp"
#include "branchtail/rng.hpp"
#include "branchtail/special.hpp"
#include "support/oracles.hpp"

using namespace branchtail;
namespace ts = testsupport;

TEST_CASE("random streams reproduce and separate") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool all_equal = true, differs_stream = false, differs_seed = false;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t x = a.next_u64();
    all_equal &= (x == b.next_u64());
    differs_stream |= (x != c.next_u64());
    differs_seed |= (x != d.next_u64());
  }
  CHECK(all_equal);
  CHECK(differs_stream);
  CHECK(differs_seed);
}

TEST_CASE("unit-open uniforms stay in (0,1] and look uniform") {
  RandomStream rng(1, 0);
  double mn = 1.0, mx = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_unit_open();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(mn < 1e-4);
  CHECK(mx > 1.0 - 1e-4);
}

TEST_CASE("zeta agrees with known values and a direct-sum bracket") {
  CHECK(special::zeta(2.0) == doctest::Approx(1.6449340668482264).epsilon(1e-12));
  CHECK(special::zeta(3.0) == doctest::Approx(1.2020569031595943).epsilon(1e-12));

  // bracket: sum_{n<=N} n^-s + integral tail bounds (summed smallest-first so
  // rounding stays below the slop)
  for (double s : {1.5, 2.5}) {
    double partial = 0.0;
    const double N = 2e6;
    for (double n = N; n >= 1; --n) partial += std::pow(n, -s);
    double lo = partial + std::pow(N + 1, 1.0 - s) / (s - 1.0);
    double hi = partial + std::pow(N, 1.0 - s) / (s - 1.0);
    double z = special::zeta(s);
    CHECK(z >= lo - 1e-9);
    CHECK(z <= hi + 1e-9);
  }
}

TEST_CASE("power tail sum matches a direct-sum bracket") {
  double s = 2.2;
  std::uint64_t n0 = 17;
  double partial = 0.0;
  const double N = 2e6;
  for (double n = static_cast<double>(n0); n <= N; ++n) partial += std::pow(n, -s);
  double lo = partial + std::pow(N + 1, 1.0 - s) / (s - 1.0);
  double hi = partial + std::pow(N, 1.0 - s) / (s - 1.0);
  double v = special::power_tail_sum(s, n0);
  CHECK(v >= lo - 1e-12);
  CHECK(v <= hi + 1e-12);
}

TEST_CASE("upper incomplete gamma on both evaluation paths") {
  // closed forms at integer a
  for (double z : {0.4, 1.0, 3.0}) {
    CHECK(special::upper_gamma(1.0, z) == doctest::Approx(std::exp(-z)).epsilon(1e-12));
    CHECK(special::upper_gamma(2.0, z) ==
          doctest::Approx((1.0 + z) * std::exp(-z)).epsilon(1e-12));
  }
  // a = 1/2 against erfc, covering z below and above the CF crossover
  for (double z : {0.25, 1.0, 2.25, 6.0}) {
    double ref = std::sqrt(M_PI) * std::erfc(std::sqrt(z));
    CHECK(special::upper_gamma(0.5, z) == doctest::Approx(ref).epsilon(1e-11));
  }
  CHECK(special::upper_gamma(0.2, 2.0) ==
        doctest::Approx(0.05961938265498282).epsilon(1e-11));
  CHECK(special::upper_gamma(0.5, 1.0) ==
        doctest::Approx(0.2788055852806620).epsilon(1e-11));
  // recurrence Gamma(a+1,z) = a Gamma(a,z) + z^a e^{-z} ties negative a to
  // the erfc value above
  double z = 2.0;
  double left = special::upper_gamma(0.5, z);
  double right = -0.5 * special::upper_gamma(-0.5, z) +
                 std::pow(z, -0.5) * std::exp(-z);
  CHECK(left == doctest::Approx(right).epsilon(1e-11));
}

namespace {

// direct series for the pareto pgf, summed until the certified remainder is
// far below the library's 1e-12 contract
double pareto_pgf_direct(double s, double alpha, double c0) {
  double phi = 0.0, sn = 1.0;
  for (std::uint64_t n = 0;; ++n) {
    phi += sn * std::pow(1.0 + static_cast<double>(n), -alpha);
    double rem = c0 * sn * s * std::pow(2.0 + static_cast<double>(n), -alpha);
    if (rem < 1e-15 && n > 4) break;
    sn *= s;
    REQUIRE(n < 80000000);
  }
  return 1.0 - (1.0 - s) * c0 * phi;
}

}  // namespace

TEST_CASE("pareto pgf: integral-tail evaluation matches the direct series") {
  for (double alpha : {0.8, 1.3}) {
    for (double c0 : {1.0, 0.6}) {
      for (double s : {0.99999, 0.999999}) {
        double lib = special::pareto_pgf(s, alpha, c0);
        double ref = pareto_pgf_direct(s, alpha, c0);
        CHECK(std::fabs(lib - ref) < 2e-11);
      }
    }
  }
}

TEST_CASE("pareto pgf special points") {
  CHECK(special::pareto_pgf(0.0, 0.8, 0.7) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(special::pareto_pgf(1.0, 0.8, 0.7) == doctest::Approx(1.0).epsilon(1e-13));
  // alpha = 1 closed form vs direct series
  double s = 0.4;
  double ref = pareto_pgf_direct(s, 1.0, 0.9);
  CHECK(special::pareto_pgf(s, 1.0, 0.9) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("pgf matches a pmf-based partial sum for every family") {
  const std::vector<DistributionSpec> dists = {
      DistributionSpec::dirac(2),
      DistributionSpec::bernoulli(0.25),
      DistributionSpec::binomial(5, 0.4),
      DistributionSpec::poisson(3.0),
      DistributionSpec::geometric(0.3),
      DistributionSpec::discrete_pareto(1.5),
      DistributionSpec::discrete_pareto(0.8, 0.6),
      DistributionSpec::zero_inflated_pareto(0.3, 1.5, 0.8),
  };
  for (const auto& d : dists) {
    for (double s : {0.3, 0.7, 0.95}) {
      double series = 0.0, cum = 0.0, sn = 1.0;
      for (std::uint64_t n = 0; n < 20000; ++n) {
        double p = d.pmf(n);
        series += p * sn;
        cum += p;
        sn *= s;
        if ((1.0 - cum) * sn < 1e-14) break;
      }
      CHECK(std::fabs(d.pgf(s) - series) < 1e-10);
    }
  }
}

TEST_CASE("samplers follow their exact pmfs") {
  struct Case {
    DistributionSpec dist;
    std::size_t cap;
  };
  const std::vector<Case> cases = {
      {DistributionSpec::bernoulli(0.25), 2},
      {DistributionSpec::poisson(3.0), 64},
      {DistributionSpec::binomial(12, 0.35), 16},
      {DistributionSpec::geometric(0.3), 128},
      {DistributionSpec::discrete_pareto(1.5), 512},
      {DistributionSpec::zero_inflated_pareto(0.4, 1.5, 0.8), 512},
  };
  std::uint64_t stream = 0;
  for (const auto& [dist, cap] : cases) {
    RandomStream rng(0xb7a11, stream++);
    const int n = 200000;
    std::vector<std::uint64_t> sample(n);
    for (int i = 0; i < n; ++i) sample[i] = dist.sample(rng);
    // TV fluctuation at n = 2e5 is a few 1e-3 for these supports
    CHECK(ts::tv_against_pmf(sample, ts::pmf_vector(dist, cap)) < 0.015);
  }
}

TEST_CASE("binomial sampler paths (loop and stdlib) agree with the law") {
  for (std::uint64_t m : {100ull, 200ull}) {  // below and above the crossover
    DistributionSpec d = DistributionSpec::binomial(m, 0.3);
    RandomStream rng(0xfeed, m);
    const int n = 100000;
    std::vector<std::uint64_t> sample(n);
    for (int i = 0; i < n; ++i) sample[i] = d.sample(rng);
    auto exact = ts::conv_power(
        ts::pmf_vector(DistributionSpec::bernoulli(0.3), m + 1), m);
    CHECK(ts::tv_against_pmf(sample, exact) < 0.015);
  }
}

TEST_CASE("moment formulas") {
  DistributionSpec pareto = DistributionSpec::discrete_pareto(2.5);
  CHECK(pareto.mean() == doctest::Approx(1.3414872572509172).epsilon(1e-12));
  CHECK(pareto.second_moment() ==
        doctest::Approx(3.8832634401200595).epsilon(1e-12));
  // independent identity: E X = sum tail(n), E X^2 = sum (2n+1) tail(n)
  double m1 = 0.0, m2 = 0.0;
  for (double n = 0; n < 3e6; ++n) {
    double t = pareto.tail(static_cast<std::uint64_t>(n));
    m1 += t;
    m2 += (2.0 * n + 1.0) * t;
  }
  CHECK(pareto.mean() == doctest::Approx(m1).epsilon(1e-6));
  CHECK(pareto.second_moment() == doctest::Approx(m2).epsilon(1e-2));

  CHECK(DistributionSpec::geometric(0.25).mean() == doctest::Approx(3.0));
  CHECK(DistributionSpec::geometric(0.25).second_moment() == doctest::Approx(21.0));
  CHECK(DistributionSpec::poisson(2.5).second_moment() == doctest::Approx(8.75));
  CHECK(DistributionSpec::binomial(6, 0.5).second_moment() == doctest::Approx(10.5));
  CHECK(DistributionSpec::zero_inflated_pareto(0.3, 1.5).mean() ==
        doctest::Approx(0.7837126046056465).epsilon(1e-12));
  CHECK(std::isinf(DistributionSpec::zero_inflated_pareto(0.3, 1.5).second_moment()));
  CHECK(std::isinf(DistributionSpec::discrete_pareto(0.8).mean()));
  CHECK(DistributionSpec::discrete_pareto(0.8).moments().log_moment_finite);
}

TEST_CASE("third and factorial moments") {
  DistributionSpec pois = DistributionSpec::poisson(2.0);
  CHECK(pois.factorial3() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(pois.third_moment() == doctest::Approx(22.0).epsilon(1e-12));

  DistributionSpec geo = DistributionSpec::geometric(0.5);
  CHECK(geo.factorial2() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(geo.factorial3() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(geo.third_moment() == doctest::Approx(13.0).epsilon(1e-12));

  CHECK(DistributionSpec::bernoulli(0.3).third_moment() == doctest::Approx(0.3));
  CHECK(std::isinf(DistributionSpec::discrete_pareto(2.5).third_moment()));

  // alpha = 3.5: formula against the tail identity E X^3 = sum (3n^2+3n+1) tail(n)
  DistributionSpec p35 = DistributionSpec::discrete_pareto(3.5);
  double m3 = 0.0;
  for (double n = 0; n < 2e6; ++n) {
    double t = p35.tail(static_cast<std::uint64_t>(n));
    m3 += (3.0 * n * n + 3.0 * n + 1.0) * t;
  }
  // remainder of the partial sum is ~3 alpha_scale N^{-1/2}: bracket it
  CHECK(p35.third_moment() >= m3 - 1e-9);
  CHECK(p35.third_moment() <= m3 + 0.02);
}

TEST_CASE("json round trips are exact and parsing is strict") {
  const std::vector<DistributionSpec> dists = {
      DistributionSpec::dirac(3),
      DistributionSpec::binomial(7, 0.2),
      DistributionSpec::discrete_pareto(0.8, 0.7),
      DistributionSpec::zero_inflated_pareto(0.3, 1.5, 0.9),
  };
  for (const auto& d : dists) {
    CHECK(DistributionSpec::from_json(d.to_json()) == d);
  }

  auto parse = [](const char* text) {
    return DistributionSpec::from_json(nlohmann::json::parse(text));
  };
  CHECK_THROWS_AS(parse(R"({"family":"poisson","lambda":1,"extra":2})"), Error);
  CHECK_THROWS_AS(parse(R"({"family":"poisson"})"), Error);
  CHECK_THROWS_AS(parse(R"({"family":"levy","alpha":1.5})"), Error);
  CHECK_THROWS_AS(parse(R"({"family":"bernoulli","p":1.5})"), Error);
  CHECK_THROWS_AS(parse(R"({"family":"discrete_pareto","alpha":-1})"), Error);
  CHECK_THROWS_AS(parse(R"({"family":"discrete_pareto","alpha":1.5,"scale":1.2})"),
                  Error);
  // scale is optional with default 1
  CHECK(parse(R"({"family":"discrete_pareto","alpha":1.5})") ==
        DistributionSpec::discrete_pareto(1.5, 1.0));
}

TEST_CASE("tail, pmf and mixture weights cohere") {
  DistributionSpec pareto = DistributionSpec::discrete_pareto(0.8, 0.7);
  CHECK(pareto.pmf(0) == doctest::Approx(0.3).epsilon(1e-13));
  for (std::uint64_t n = 1; n <= 30; ++n) {
    CHECK(pareto.pmf(n) ==
          doctest::Approx(pareto.tail(n - 1) - pareto.tail(n)).epsilon(1e-12));
  }
  DistributionSpec zip = DistributionSpec::zero_inflated_pareto(0.4, 1.5, 0.8);
  CHECK(zip.tail(5) == doctest::Approx(0.4 * 0.8 * std::pow(6.0, -1.5)).epsilon(1e-12));
  CHECK(zip.pmf(0) == doctest::Approx(1.0 - 0.4 * 0.8).epsilon(1e-12));
  RandomStream rng(0xcafe, 0);
  int zeros = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) zeros += zip.sample(rng) == 0;
  CHECK(static_cast<double>(zeros) / n ==
        doctest::Approx(1.0 - 0.32).epsilon(0.01));

  // real-threshold tails floor to the integer grid
  CHECK(pareto.tail_real(2.7) == doctest::Approx(pareto.tail(2)).epsilon(1e-13));
}
