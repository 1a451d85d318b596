#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "branchtail/process.hpp"

namespace branchtail {

// Stationary-tail-to-immigration-tail ratio for heavy immigration:
// sum_{k>=0} mu^{k alpha} = 1 / (1 - mu^alpha).  Requires mu in (0,1).
double model1_tail_constant(double mu, double alpha);

struct Model2Constants {
  std::vector<double> d;    // d_0 = 0, d_k = mu d_{k-1} + mu^{(k-1) alpha}
  std::vector<double> psi;  // psi_k = mean_b * d_k + c * mu^{k alpha}
  double total = 0;         // sum of psi with remainder < 1e-8
};

// Tail constants for heavy offspring (alpha in (1,2), mu < 1, c >= 0 the
// immigration/offspring tail ratio).  k_max < 0 grows the series until the
// analytic remainder bound drops below 1e-8.
Model2Constants model2_tail_constants(double mu, double alpha, double c,
                                      double mean_b, int k_max = -1);

// a_n = (tail_scale * n)^{1/alpha}, the level with n P(X > a_n) -> 1 when
// P(X > x) ~ tail_scale * x^{-alpha}.
double norming_sequence(double n, double alpha, double tail_scale);

// The exact constant C with P(X > x) ~ C x^{-alpha} for the stationary law of
// a heavy-tailed config (model1: c0 / (1 - mu^alpha); model2: q c0 * total).
// Also reports alpha.  Refuses light configs.
struct TailTheory {
  double alpha = 0;
  double scale = 0;     // C
  double constant = 0;  // ratio of stationary tail to driving-term tail
};
TailTheory tail_theory(const ModelConfig& cfg);

struct HillEstimate {
  double alpha_hat = 0;
  double ci_low = 0;   // alpha_hat -+ 1.96 alpha_hat / sqrt(k)
  double ci_high = 0;
  int k = 0;
};

// Hill tail-index estimator on integer samples with the +0.5 continuity
// shift.  Requires k_order >= 10 and at least k_order + 1 samples; errors
// when the top order statistics are all equal (no tail variation).
HillEstimate hill(std::span<const std::uint64_t> samples, int k_order);
// Real-valued variant (no shift); drops nonpositive values.
HillEstimate hill_positive(std::vector<double> magnitudes, int k_order);

struct RatioPoint {
  double probe_quantile = 0;
  double threshold = 0;
  double empirical_tail = 0;
  double ref_tail = 0;
  double ratio = 0;
  double std_error = 0;  // binomial standard error of the ratio
  bool reliable = true;  // false when no sample exceeds the probe
};

// Empirical tail / reference tail at thresholds given by empirical quantiles.
std::vector<RatioPoint> tail_ratio_curve(
    std::span<const std::uint64_t> samples,
    const std::function<double(double)>& ref_tail,
    std::span<const double> probe_quantiles);

// Monte Carlo check of the one-step compound-sum asymptotics
//   P(sum_{i<=B} A_i > x) ~ P(B > x/mu):
// simulates `reps` compound sums and compares their tail with the shifted
// immigration tail at the probe quantiles.  Requires mu in (0,1).
std::vector<RatioPoint> compound_tail_check(const DistributionSpec& offspring,
                                            const DistributionSpec& immigration,
                                            std::span<const double> probe_quantiles,
                                            std::int64_t reps, RandomStream& rng);

}  // namespace branchtail
