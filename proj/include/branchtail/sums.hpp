#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "branchtail/process.hpp"

namespace branchtail {

enum class SumRegime { gaussian, stable_low, stable_mid };

struct Centering {
  double center = 0;
  double scale = 1;
  SumRegime regime = SumRegime::gaussian;
  double alpha = 2;  // driving tail index (2 for gaussian)
};

// Centering/scaling of S_n for the config's regime:
//   light           -> (n E(B)/(1-mu), sqrt(n))          [gaussian]
//   heavy, a<1      -> (0, a_n)                          [stable_low]
//   heavy, 1<a<2    -> (n E(X), a_n)                     [stable_mid]
// alpha = 1 is refused.
Centering regime_centering(const ModelConfig& cfg, std::int64_t n);

// gamma(0) + 2 sum_{i=1..max_lag} gamma(i) from one stationary stretch;
// max_lag <= 0 selects ceil(10 log10 n).  A negative estimate is an error.
double long_run_variance(std::span<const std::uint64_t> values, int max_lag);

struct SumsReport {
  SumRegime regime = SumRegime::gaussian;
  double center = 0;
  double scale = 1;
  std::int64_t n = 0;
  std::vector<double> normalized;  // (S_n - center)/scale per replicate
};

// Independent stationary stretches (fresh burn-in per replicate, one stream
// per replicate starting at stream_base), each collapsed to its normalized
// partial sum.  Requires reps >= 100 and an ergodic config.
SumsReport partial_sum_replicates(const ModelConfig& cfg, std::int64_t n,
                                  int reps, std::uint64_t master_seed,
                                  std::uint64_t stream_base,
                                  std::int64_t burn_in, int threads);

struct StableDiagnostics {
  double hill_index = 0;           // Hill index of |normalized sums|
  double self_similarity_ks = 0;   // two-sample KS between the n and 2n batches
  bool stable_regime_plausible = true;  // false when hill_index indicates a
                                        // finite-variance (non-stable) regime
};

StableDiagnostics stable_diagnostics(std::span<const double> sums_n,
                                     std::span<const double> sums_2n,
                                     double alpha);

}  // namespace branchtail
