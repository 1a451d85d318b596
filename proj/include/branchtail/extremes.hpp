#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "branchtail/process.hpp"

namespace branchtail {

// theta = 1 - mu^alpha, the fraction of "independent" exceedances after
// clustering.  Requires mu in [0,1) and alpha > 0 (mu = 0 gives theta = 1).
double theoretical_extremal_index(double mu, double alpha);

// Maxima over consecutive blocks; a trailing partial block is dropped.
std::vector<std::uint64_t> block_maxima(std::span<const std::uint64_t> values,
                                        std::int64_t block_len);

// KS distance between {maxima / a_n} and the limit law exp(-theta x^-alpha).
double frechet_gof(std::span<const std::uint64_t> maxima, double a_n,
                   double theta, double alpha);

enum class ThetaMethod { blocks, runs };

// Blocks estimator: (#blocks with an exceedance) / (#exceedances), param =
// block length.  Runs estimator: (#exceedances followed by >= param
// non-exceedances) / (#exceedances), param = run gap.  Requires >= 20
// exceedances; clamped to [0,1].
double extremal_index_estimate(std::span<const std::uint64_t> values,
                               double threshold, ThetaMethod method,
                               std::int64_t param);

// Maximal groups of exceedance indices with consecutive gaps <= gap.
std::vector<std::vector<std::int64_t>> decluster(
    std::span<const std::uint64_t> values, double threshold, std::int64_t gap);

struct ClusterSizeFit {
  std::vector<double> empirical_pmf;  // sizes 1..len
  std::vector<double> geometric_pmf;  // (1-mu^alpha) mu^{alpha(k-1)}
  double chi_square = 0;              // classes {1,2,3,4,>=5}
  double mean_size = 0;
  double target_mean = 0;             // 1 / (1 - mu^alpha)
  std::int64_t cluster_count = 0;
};

// Fit of the declustered cluster sizes against the geometric law with
// success probability 1 - mu^alpha.  Requires >= 100 clusters.
ClusterSizeFit cluster_size_fit(const std::vector<std::vector<std::int64_t>>& clusters,
                                double mu, double alpha);

struct LagProfilePoint {
  int lag = 0;
  double median_ratio = 0;
  std::int64_t events = 0;
};

// Median of X_{s+t}/X_s over conditioning events X_s > (empirical q-quantile)
// for t = 1..max_lag; the limit medians are mu^t.  Requires quantile >= 0.99
// and at least 200 conditioning events.
std::vector<LagProfilePoint> tail_process_profile(
    std::span<const std::uint64_t> values, double quantile, int max_lag);

// KS distance between the scaled inter-cluster start gaps (gap * theta / n)
// and the standard exponential law.  The exceedance level is a_n * u with
// u = 1 (required).  Requires >= 20 clusters.
double intercluster_exponential_check(
    const std::vector<std::vector<std::int64_t>>& clusters, double n,
    double theta, double u);

// P(max_{m <= t <= r} X_t > threshold | X_0 > threshold) for each m in ms:
// the no-distant-clustering diagnostic curve (it should fall towards
// r * P(X > threshold) as m grows).
std::vector<double> anticluster_curve(std::span<const std::uint64_t> values,
                                      double threshold, std::int64_t r,
                                      std::span<const int> ms);

// Streaming block-maxima sampler: simulates blocks_per_chunk-block chunks on
// independent streams (fresh burn-in each) and keeps only the maxima, so very
// long effective paths never materialise in memory.
std::vector<std::uint64_t> simulate_block_maxima(const ModelConfig& cfg,
                                                 std::int64_t block_len,
                                                 std::int64_t n_blocks,
                                                 std::uint64_t master_seed,
                                                 std::uint64_t stream_base,
                                                 std::int64_t burn_in,
                                                 int threads);

}  // namespace branchtail
