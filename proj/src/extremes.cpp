#include "branchtail/extremes.hpp"

#include <algorithm>
#include <cmath>

#include "branchtail/error.hpp"
#include "branchtail/parallel.hpp"
#include "branchtail/stats.hpp"

namespace branchtail {

double theoretical_extremal_index(double mu, double alpha) {
  require(mu >= 0.0 && mu < 1.0, ErrorCode::invalid_argument,
          "extremal index requires offspring mean in [0,1)");
  require(alpha > 0.0, ErrorCode::invalid_argument,
          "extremal index requires alpha > 0");
  return 1.0 - std::pow(mu, alpha);
}

std::vector<std::uint64_t> block_maxima(std::span<const std::uint64_t> values,
                                        std::int64_t block_len) {
  require(block_len >= 1, ErrorCode::invalid_argument,
          "block maxima require block_len >= 1");
  std::size_t blocks = values.size() / static_cast<std::size_t>(block_len);
  std::vector<std::uint64_t> out(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::uint64_t m = 0;
    for (std::int64_t i = 0; i < block_len; ++i)
      m = std::max(m, values[b * block_len + i]);
    out[b] = m;
  }
  return out;
}

double frechet_gof(std::span<const std::uint64_t> maxima, double a_n,
                   double theta, double alpha) {
  require(a_n > 0.0 && theta > 0.0 && alpha > 0.0, ErrorCode::invalid_argument,
          "frechet_gof requires positive a_n, theta, alpha");
  std::vector<double> scaled;
  scaled.reserve(maxima.size());
  for (std::uint64_t m : maxima) scaled.push_back(static_cast<double>(m) / a_n);
  auto cdf = [theta, alpha](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(-theta * std::pow(x, -alpha));
  };
  return ks_statistic(std::move(scaled), cdf);
}

double extremal_index_estimate(std::span<const std::uint64_t> values,
                               double threshold, ThetaMethod method,
                               std::int64_t param) {
  require(param >= 1, ErrorCode::invalid_argument,
          "extremal index estimator requires a positive block/run parameter");
  std::int64_t n = static_cast<std::int64_t>(values.size());
  std::int64_t exceed = 0;
  for (std::uint64_t v : values)
    if (static_cast<double>(v) > threshold) ++exceed;
  require(exceed >= 20, ErrorCode::invalid_argument,
          "extremal index estimator requires at least 20 exceedances");

  double est;
  if (method == ThetaMethod::blocks) {
    std::int64_t blocks_hit = 0;
    std::int64_t blocks = n / param;
    require(blocks >= 1, ErrorCode::invalid_argument,
            "extremal index estimator: block length exceeds the sample");
    for (std::int64_t b = 0; b < blocks; ++b) {
      for (std::int64_t i = 0; i < param; ++i) {
        if (static_cast<double>(values[b * param + i]) > threshold) {
          ++blocks_hit;
          break;
        }
      }
    }
    est = static_cast<double>(blocks_hit) / static_cast<double>(exceed);
  } else {
    std::int64_t cluster_ends = 0;
    for (std::int64_t t = 0; t < n; ++t) {
      if (!(static_cast<double>(values[t]) > threshold)) continue;
      bool followed_by_gap = true;
      for (std::int64_t j = 1; j <= param && t + j < n; ++j) {
        if (static_cast<double>(values[t + j]) > threshold) {
          followed_by_gap = false;
          break;
        }
      }
      if (followed_by_gap) ++cluster_ends;
    }
    est = static_cast<double>(cluster_ends) / static_cast<double>(exceed);
  }
  return std::clamp(est, 0.0, 1.0);
}

std::vector<std::vector<std::int64_t>> decluster(
    std::span<const std::uint64_t> values, double threshold, std::int64_t gap) {
  require(gap >= 1, ErrorCode::invalid_argument, "decluster requires gap >= 1");
  std::vector<std::vector<std::int64_t>> clusters;
  std::int64_t n = static_cast<std::int64_t>(values.size());
  std::int64_t last = -1;
  for (std::int64_t t = 0; t < n; ++t) {
    if (!(static_cast<double>(values[t]) > threshold)) continue;
    if (last < 0 || t - last > gap) clusters.emplace_back();
    clusters.back().push_back(t);
    last = t;
  }
  return clusters;
}

ClusterSizeFit cluster_size_fit(
    const std::vector<std::vector<std::int64_t>>& clusters, double mu,
    double alpha) {
  require(clusters.size() >= 100, ErrorCode::invalid_argument,
          "cluster size fit requires at least 100 clusters");
  double theta = theoretical_extremal_index(mu, alpha);
  require(theta > 0.0 && theta < 1.0, ErrorCode::invalid_argument,
          "cluster size fit requires a nondegenerate extremal index");

  ClusterSizeFit fit;
  fit.cluster_count = static_cast<std::int64_t>(clusters.size());
  fit.target_mean = 1.0 / theta;
  std::size_t max_size = 0;
  double total = 0.0;
  for (const auto& c : clusters) {
    max_size = std::max(max_size, c.size());
    total += static_cast<double>(c.size());
  }
  fit.mean_size = total / static_cast<double>(clusters.size());

  fit.empirical_pmf.assign(max_size, 0.0);
  for (const auto& c : clusters)
    fit.empirical_pmf[c.size() - 1] += 1.0 / static_cast<double>(clusters.size());
  fit.geometric_pmf.resize(max_size);
  double mua = std::pow(mu, alpha);
  for (std::size_t k = 1; k <= max_size; ++k)
    fit.geometric_pmf[k - 1] = theta * std::pow(mua, static_cast<double>(k - 1));

  // chi-square over size classes {1, 2, 3, 4, >= 5}
  std::vector<std::int64_t> observed(5, 0);
  for (const auto& c : clusters) {
    std::size_t cls = std::min<std::size_t>(c.size(), 5) - 1;
    ++observed[cls];
  }
  std::vector<double> prob(5);
  for (int k = 1; k <= 4; ++k) prob[k - 1] = theta * std::pow(mua, k - 1);
  prob[4] = std::pow(mua, 4);  // P(size >= 5)
  fit.chi_square = chi_square_statistic(observed, prob);
  return fit;
}

std::vector<LagProfilePoint> tail_process_profile(
    std::span<const std::uint64_t> values, double quantile, int max_lag) {
  require(quantile >= 0.99 && quantile < 1.0, ErrorCode::invalid_argument,
          "tail process profile requires a conditioning quantile >= 0.99");
  require(max_lag >= 1, ErrorCode::invalid_argument,
          "tail process profile requires max_lag >= 1");
  double threshold = empirical_quantile(values, quantile);
  std::int64_t n = static_cast<std::int64_t>(values.size());
  std::vector<LagProfilePoint> out;
  for (int lag = 1; lag <= max_lag; ++lag) {
    std::vector<double> ratios;
    for (std::int64_t t = 0; t + lag < n; ++t) {
      if (static_cast<double>(values[t]) > threshold)
        ratios.push_back(static_cast<double>(values[t + lag]) /
                         static_cast<double>(values[t]));
    }
    require(ratios.size() >= 200, ErrorCode::invalid_argument,
            "tail process profile requires at least 200 conditioning events");
    LagProfilePoint pt;
    pt.lag = lag;
    pt.events = static_cast<std::int64_t>(ratios.size());
    pt.median_ratio = median_of(std::move(ratios));
    out.push_back(pt);
  }
  return out;
}

double intercluster_exponential_check(
    const std::vector<std::vector<std::int64_t>>& clusters, double n,
    double theta, double u) {
  require(u == 1.0, ErrorCode::invalid_argument,
          "intercluster check is calibrated at exceedance level a_n (u = 1)");
  require(theta > 0.0 && theta <= 1.0 && n > 0.0, ErrorCode::invalid_argument,
          "intercluster check requires theta in (0,1] and n > 0");
  require(clusters.size() >= 21, ErrorCode::invalid_argument,
          "intercluster check requires at least 20 inter-cluster gaps");
  std::vector<double> scaled;
  scaled.reserve(clusters.size() - 1);
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    double gap = static_cast<double>(clusters[i].front() - clusters[i - 1].front());
    scaled.push_back(gap * theta / n);
  }
  auto cdf = [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); };
  return ks_statistic(std::move(scaled), cdf);
}

std::vector<double> anticluster_curve(std::span<const std::uint64_t> values,
                                      double threshold, std::int64_t r,
                                      std::span<const int> ms) {
  require(r >= 2, ErrorCode::invalid_argument, "anticluster curve requires r >= 2");
  std::int64_t n = static_cast<std::int64_t>(values.size());
  require(n > r, ErrorCode::invalid_argument,
          "anticluster curve requires more samples than r");
  std::vector<std::int64_t> anchors;
  for (std::int64_t t = 0; t + r < n; ++t)
    if (static_cast<double>(values[t]) > threshold) anchors.push_back(t);
  require(anchors.size() >= 100, ErrorCode::invalid_argument,
          "anticluster curve requires at least 100 anchor exceedances");

  std::vector<double> out;
  out.reserve(ms.size());
  for (int m : ms) {
    require(m >= 1 && m <= r, ErrorCode::invalid_argument,
            "anticluster curve requires 1 <= m <= r");
    std::int64_t hits = 0;
    for (std::int64_t t : anchors) {
      for (std::int64_t j = m; j <= r; ++j) {
        if (static_cast<double>(values[t + j]) > threshold) {
          ++hits;
          break;
        }
      }
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(anchors.size()));
  }
  return out;
}

std::vector<std::uint64_t> simulate_block_maxima(const ModelConfig& cfg,
                                                 std::int64_t block_len,
                                                 std::int64_t n_blocks,
                                                 std::uint64_t master_seed,
                                                 std::uint64_t stream_base,
                                                 std::int64_t burn_in,
                                                 int threads) {
  require(block_len >= 1 && n_blocks >= 1 && burn_in >= 0,
          ErrorCode::invalid_argument,
          "block maxima simulation requires positive block_len and n_blocks");
  double mu = cfg.offspring.mean();
  if (!(mu < 1.0) || !cfg.immigration.moments().log_moment_finite) {
    ErgodicityReport rep = check_ergodicity(cfg);
    fail(ErrorCode::not_ergodic,
         "config is not ergodic: " + rep.to_json().dump());
  }

  // One chunk of consecutive blocks per stream; chunks are independent paths
  // with a fresh burn-in, so the result depends only on (seed, stream_base).
  const std::int64_t blocks_per_chunk =
      std::max<std::int64_t>(1, 65536 / std::max<std::int64_t>(block_len, 1));
  std::int64_t n_chunks = (n_blocks + blocks_per_chunk - 1) / blocks_per_chunk;

  std::vector<std::uint64_t> maxima(static_cast<std::size_t>(n_blocks));
  parallel_for(n_chunks, threads, [&](std::int64_t chunk) {
    RandomStream rng(master_seed, stream_base + static_cast<std::uint64_t>(chunk));
    std::uint64_t x = 0;
    for (std::int64_t t = 0; t < burn_in; ++t) x = step(x, cfg, rng);
    std::int64_t first = chunk * blocks_per_chunk;
    std::int64_t last = std::min(first + blocks_per_chunk, n_blocks);
    for (std::int64_t b = first; b < last; ++b) {
      std::uint64_t m = 0;
      for (std::int64_t i = 0; i < block_len; ++i) {
        x = step(x, cfg, rng);
        m = std::max(m, x);
      }
      maxima[static_cast<std::size_t>(b)] = m;
    }
  });
  return maxima;
}

}  // namespace branchtail
