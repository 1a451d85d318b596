#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "branchtail/tails.hpp"
#include "support/oracles.hpp"

using namespace branchtail;
namespace ts = testsupport;

namespace {

ModelConfig make_config(DistributionSpec offspring, DistributionSpec immigration,
                        Regime regime, Variant variant = Variant::sum) {
  ModelConfig cfg;
  cfg.offspring = std::move(offspring);
  cfg.immigration = std::move(immigration);
  cfg.variant = variant;
  cfg.regime = regime;
  return cfg;
}

}  // namespace

TEST_CASE("geometric tail constant: frozen values and extremal-index identity") {
  CHECK(model1_tail_constant(0.5, 0.8) ==
        doctest::Approx(2.3493435161787266).epsilon(1e-14));
  CHECK(model1_tail_constant(0.5, 1.5) ==
        doctest::Approx(1.5469181606780271).epsilon(1e-14));
  // The constant is exactly the reciprocal of 1 - mu^alpha.
  for (double mu : {0.2, 0.5, 0.9}) {
    for (double alpha : {0.5, 0.8, 1.5, 2.5}) {
      double c = model1_tail_constant(mu, alpha);
      CHECK(c * (1.0 - std::pow(mu, alpha)) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(model1_tail_constant(1.0, 0.8), Error);
  CHECK_THROWS_AS(model1_tail_constant(0.5, 0.0), Error);
}

TEST_CASE("offspring-tail constants: recursion, closed form and remainder") {
  Model2Constants k = model2_tail_constants(0.5, 1.5, 0.0, 1.0, 8);
  CHECK(k.d[0] == 0.0);
  CHECK(k.d[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(k.d[2] == doctest::Approx(0.8535533905932737).epsilon(1e-14));
  CHECK(k.d[3] == doctest::Approx(0.5517766952966369).epsilon(1e-14));
  // psi_k = mean_b d_k when the immigration/offspring tail ratio vanishes.
  for (std::size_t i = 0; i < k.psi.size(); ++i)
    CHECK(k.psi[i] == doctest::Approx(k.d[i]).epsilon(1e-14));

  // The full series has the closed form
  //   mean_b / ((1-mu)(1-mu^alpha)) + c / (1-mu^alpha)
  // (Cauchy product of the two geometric series behind d_k).
  Model2Constants a = model2_tail_constants(0.5, 1.5, 0.0, 1.0);
  CHECK(a.total == doctest::Approx(3.0938363213560542).epsilon(1e-8));
  Model2Constants b = model2_tail_constants(0.5, 1.5, 2.0, 1.5);
  CHECK(b.total == doctest::Approx(7.734590803390136).epsilon(1e-8));

  // Automatic growth matches a deep explicit cutoff.
  Model2Constants deep = model2_tail_constants(0.5, 1.5, 2.0, 1.5, 200);
  CHECK(std::fabs(b.total - deep.total) < 1e-8);

  CHECK_THROWS_AS(model2_tail_constants(0.5, 2.5, 0.0, 1.0), Error);
  CHECK_THROWS_AS(model2_tail_constants(0.5, 1.5, -0.5, 1.0), Error);
  CHECK_THROWS_AS(model2_tail_constants(1.1, 1.5, 0.0, 1.0), Error);
}

TEST_CASE("norming sequence inverts the tail") {
  CHECK(norming_sequence(100.0, 1.0, 2.0) == doctest::Approx(200.0));
  // n * tail(a_n) = 1 when tail(x) = scale x^{-alpha}.
  for (double n : {1e3, 1e6}) {
    for (double alpha : {0.8, 1.5, 2.5}) {
      double a_n = norming_sequence(n, alpha, 0.5);
      CHECK(n * 0.5 * std::pow(a_n, -alpha) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(norming_sequence(0.0, 1.0, 1.0), Error);
}

TEST_CASE("tail theory dispatches on the declared regime") {
  TailTheory m1 = tail_theory(make_config(DistributionSpec::bernoulli(0.5),
                                          DistributionSpec::discrete_pareto(0.8),
                                          Regime::model1));
  CHECK(m1.alpha == doctest::Approx(0.8));
  CHECK(m1.constant == doctest::Approx(2.3493435161787266).epsilon(1e-13));
  CHECK(m1.scale == doctest::Approx(2.3493435161787266).epsilon(1e-13));

  TailTheory scaled = tail_theory(make_config(
      DistributionSpec::bernoulli(0.5),
      DistributionSpec::discrete_pareto(1.5, 0.5), Regime::model1));
  CHECK(scaled.scale == doctest::Approx(0.5 * 1.5469181606780271).epsilon(1e-13));

  // Heavy offspring with light immigration: the series constant appears
  // scaled by the offspring tail q c0.
  ModelConfig m2_cfg = make_config(
      DistributionSpec::zero_inflated_pareto(0.3, 1.5, 1.0),
      DistributionSpec::poisson(1.0), Regime::model2);
  TailTheory m2 = tail_theory(m2_cfg);
  double mu = m2_cfg.offspring.mean();
  CHECK(mu == doctest::Approx(0.7837126046056465).epsilon(1e-13));
  double mua = std::pow(mu, 1.5);
  double closed = 1.0 / ((1.0 - mu) * (1.0 - mua));
  CHECK(m2.alpha == doctest::Approx(1.5));
  CHECK(m2.constant == doctest::Approx(closed).epsilon(1e-7));
  CHECK(m2.scale == doctest::Approx(0.3 * closed).epsilon(1e-7));

  // Pareto immigration with the same index contributes through the tail
  // ratio c = c0_B / (q c0_A).
  ModelConfig m2_heavy_b = make_config(
      DistributionSpec::zero_inflated_pareto(0.3, 1.5, 1.0),
      DistributionSpec::discrete_pareto(1.5, 0.5), Regime::model2);
  TailTheory m2b = tail_theory(m2_heavy_b);
  double c = 0.5 / 0.3;
  double mean_b = 1.306187674342744;
  double closed_b = mean_b / ((1.0 - mu) * (1.0 - mua)) + c / (1.0 - mua);
  CHECK(m2b.constant == doctest::Approx(closed_b).epsilon(1e-7));
  CHECK(m2b.scale == doctest::Approx(0.3 * closed_b).epsilon(1e-7));

  CHECK_THROWS_AS(tail_theory(make_config(DistributionSpec::bernoulli(0.5),
                                          DistributionSpec::poisson(1.0),
                                          Regime::light)),
                  Error);
}

TEST_CASE("hill estimator recovers known tail indices") {
  RandomStream rng(0x811l, 0);
  const int n = 20000;
  std::vector<double> cont(n);
  for (int i = 0; i < n; ++i) cont[i] = ts::pareto_real(1.5, 1.0, rng);
  HillEstimate real_est = hill_positive(cont, 500);
  CHECK(real_est.alpha_hat == doctest::Approx(1.5).epsilon(0.12));
  CHECK(real_est.ci_low < real_est.alpha_hat);
  CHECK(real_est.ci_high > real_est.alpha_hat);

  DistributionSpec heavy = DistributionSpec::discrete_pareto(0.8);
  std::vector<std::uint64_t> disc(n);
  RandomStream rng2(0x811l, 1);
  for (int i = 0; i < n; ++i) disc[i] = heavy.sample(rng2);
  HillEstimate int_est = hill(disc, 500);
  CHECK(int_est.alpha_hat == doctest::Approx(0.8).epsilon(0.12));

  std::vector<std::uint64_t> flat(100, 7);
  CHECK_THROWS_AS(hill(flat, 20), Error);
  CHECK_THROWS_AS(hill(disc, 5), Error);
  std::vector<std::uint64_t> tiny(disc.begin(), disc.begin() + 10);
  CHECK_THROWS_AS(hill(tiny, 10), Error);
}

TEST_CASE("tail ratio curve sits near one for an exact reference") {
  DistributionSpec heavy = DistributionSpec::discrete_pareto(1.5);
  RandomStream rng(0x7a11, 0);
  const int n = 100000;
  std::vector<std::uint64_t> sample(n);
  for (int i = 0; i < n; ++i) sample[i] = heavy.sample(rng);

  const std::vector<double> probes = {0.99, 0.999, 0.9999};
  auto ref = [&](double x) { return heavy.tail_real(x); };
  std::vector<RatioPoint> curve = tail_ratio_curve(sample, ref, probes);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].reliable);
  CHECK(curve[0].ratio == doctest::Approx(1.0).epsilon(0.15));
  CHECK(curve[1].reliable);
  CHECK(curve[1].ratio == doctest::Approx(1.0).epsilon(0.35));
  // ~10 expected exceedances: reported but flagged thin.
  CHECK_FALSE(curve[2].reliable);
  for (const RatioPoint& pt : curve) {
    CHECK(pt.threshold >= 0.0);
    CHECK(pt.ref_tail > 0.0);
  }

  CHECK_THROWS_AS(tail_ratio_curve(sample, ref, std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(
      tail_ratio_curve(std::vector<std::uint64_t>{}, ref, probes), Error);
}

TEST_CASE("one-step compound sums follow the shifted immigration tail") {
  DistributionSpec offspring = DistributionSpec::bernoulli(0.5);
  DistributionSpec immigration = DistributionSpec::discrete_pareto(0.8);
  RandomStream rng(0xc0de, 0);
  const std::vector<double> probes = {0.99, 0.999};
  std::vector<RatioPoint> curve =
      compound_tail_check(offspring, immigration, probes, 200000, rng);
  REQUIRE(curve.size() == 2);
  for (const RatioPoint& pt : curve) {
    CHECK(pt.reliable);
    CHECK(pt.ratio == doctest::Approx(1.0).epsilon(0.25));
  }

  RandomStream rng2(0xc0de, 1);
  CHECK_THROWS_AS(compound_tail_check(DistributionSpec::dirac(0), immigration,
                                      probes, 200000, rng2),
                  Error);
  CHECK_THROWS_AS(compound_tail_check(DistributionSpec::dirac(1), immigration,
                                      probes, 200000, rng2),
                  Error);
  CHECK_THROWS_AS(
      compound_tail_check(offspring, immigration, probes, 100, rng2), Error);
}
