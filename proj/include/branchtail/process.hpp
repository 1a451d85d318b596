#pragma once

#include <cstdint>
#include <vector>

#include "branchtail/distributions.hpp"
#include "branchtail/rng.hpp"

namespace branchtail {

enum class Variant { sum, max };
enum class Regime { model1, model2, light };

// X_t = thin(X_{t-1}) + B_t   (sum variant), or
// X_t = max(thin(X_{t-1}), B_t)  (max variant),
// where thin(x) = sum of x iid offspring draws.
struct ModelConfig {
  DistributionSpec offspring = DistributionSpec::dirac(0);
  DistributionSpec immigration = DistributionSpec::dirac(0);
  Variant variant = Variant::sum;
  Regime regime = Regime::light;

  double offspring_mean() const { return offspring.mean(); }

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

// Checks the declared regime's assumptions; throws on inconsistency.
//   model1: mu in (0,1), E(A^2) < inf, immigration discrete_pareto alpha in (0,2)
//   model2: offspring zero_inflated_pareto, alpha in (1,2), q > 0, mu in (0,1);
//           immigration either light-tailed or Pareto-tailed with the same alpha
//   light:  E(A^2) < inf, E(B^2) < inf, mu < 1
void validate_regime(const ModelConfig& cfg);

// Limit of P(B > x) / P(A > x) for model2 configs (0 for light immigration).
double model2_immigration_ratio(const ModelConfig& cfg);

struct ErgodicityReport {
  double mu = 0;               // offspring mean (may be +inf)
  bool log_moment_ok = false;  // E log(1 + B) < inf
  double fw_integral = 0;      // integral of (1-g(s))/(f(s)-s) over [0,1); +inf flag
  bool ergodic = false;        // mu < 1 && log_moment_ok && fw_integral finite

  nlohmann::json to_json() const;
};

// Evaluates the drift integral with adaptive quadrature on [0, 1-delta]
// (delta = 1e-6) plus an analytic bound for the endpoint sliver, using
// f(s) - s >= (1-mu)(1-s).
ErgodicityReport check_ergodicity(const ModelConfig& cfg);

struct PathSample {
  std::vector<std::uint64_t> values;
  std::int64_t burn_in = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;
  ModelConfig config;
};

// thin(x): sum of x iid draws from `offspring`.  Uses exact closed-form
// shortcuts (bernoulli -> binomial, poisson -> poisson, dirac -> x*value,
// binomial -> binomial, geometric -> negative binomial) and falls back to the
// O(x) loop for the Pareto families.
std::uint64_t thin(std::uint64_t x, const DistributionSpec& offspring,
                   RandomStream& rng);
// The O(x) summation loop with no shortcuts (reference implementation).
std::uint64_t thin_generic(std::uint64_t x, const DistributionSpec& offspring,
                           RandomStream& rng);

std::uint64_t step(std::uint64_t state, const ModelConfig& cfg, RandomStream& rng);

// Path of `length` states started from 0 with the first `burn_in` states
// dropped.  Refuses configs that fail the stationarity gate.
PathSample simulate_path(const ModelConfig& cfg, std::int64_t length,
                         std::int64_t burn_in, std::uint64_t master_seed,
                         std::uint64_t stream);

// One draw of the k-fold iterated thinning started from a single individual
// (mean mu^k).  k = 0 returns 1.
std::uint64_t sample_iterated_thinning(int k, const DistributionSpec& offspring,
                                       RandomStream& rng);

// One draw from the stationary law via the backward series
//   X = sum_k thin^k(B_k)   (sum variant)   or   max_k thin^k(B_k)  (max).
// Sum terms are independent.  The max terms are not: thinning distributes
// over a maximum only when the operators are shared across cohorts (prefix
// sums over one offspring sequence), so the max variant realises the coupled
// construction by iterating the recursion forward from an empty state.
// depth < 0 selects the automatic truncation: K = ceil(ln 1e-6 / ln mu),
// doubled while any of the trailing ceil(ln 10 / -ln mu) terms was nonzero.
// An explicit depth >= 0 evaluates the truncated series as given (no
// ergodicity gate, useful for oracles); automatic mode requires mu < 1.
std::uint64_t sample_stationary_backward(const ModelConfig& cfg, int depth,
                                         RandomStream& rng);

}  // namespace branchtail
