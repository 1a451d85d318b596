#include "branchtail/sums.hpp"

#include <algorithm>
#include <cmath>

#include "branchtail/error.hpp"
#include "branchtail/parallel.hpp"
#include "branchtail/stats.hpp"
#include "branchtail/tails.hpp"

namespace branchtail {

Centering regime_centering(const ModelConfig& cfg, std::int64_t n) {
  require(n >= 1, ErrorCode::invalid_argument, "centering requires n >= 1");
  require(cfg.variant == Variant::sum, ErrorCode::invalid_argument,
          "partial-sum limits are stated for the sum recursion");
  validate_regime(cfg);
  double mu = cfg.offspring.mean();
  double dn = static_cast<double>(n);

  Centering out;
  if (cfg.regime == Regime::light) {
    out.regime = SumRegime::gaussian;
    out.alpha = 2.0;
    out.center = dn * cfg.immigration.mean() / (1.0 - mu);
    out.scale = std::sqrt(dn);
    return out;
  }

  TailTheory theory = tail_theory(cfg);
  require(theory.alpha != 1.0, ErrorCode::invalid_argument,
          "partial-sum limits at tail index 1 need a slowly varying centering "
          "and are not supported");
  out.alpha = theory.alpha;
  out.scale = norming_sequence(dn, theory.alpha, theory.scale);
  if (theory.alpha < 1.0) {
    out.regime = SumRegime::stable_low;
    out.center = 0.0;
  } else {
    out.regime = SumRegime::stable_mid;
    out.center = dn * cfg.immigration.mean() / (1.0 - mu);
  }
  return out;
}

double long_run_variance(std::span<const std::uint64_t> values, int max_lag) {
  std::int64_t n = static_cast<std::int64_t>(values.size());
  require(n >= 16, ErrorCode::invalid_argument,
          "long-run variance requires at least 16 observations");
  int lag = max_lag;
  if (lag <= 0)
    lag = static_cast<int>(std::ceil(10.0 * std::log10(static_cast<double>(n))));
  require(n > 2 * static_cast<std::int64_t>(lag), ErrorCode::invalid_argument,
          "long-run variance: lag window too wide for the sample");

  double mean = 0.0;
  for (std::uint64_t v : values) mean += static_cast<double>(v);
  mean /= static_cast<double>(n);

  auto gamma = [&](int i) {
    double s = 0.0;
    for (std::int64_t t = 0; t + i < n; ++t)
      s += (static_cast<double>(values[t]) - mean) *
           (static_cast<double>(values[t + i]) - mean);
    return s / static_cast<double>(n);
  };

  double lrv = gamma(0);
  for (int i = 1; i <= lag; ++i) lrv += 2.0 * gamma(i);
  require(lrv > 0.0, ErrorCode::runtime,
          "long-run variance estimate is not positive; widen the sample");
  return lrv;
}

SumsReport partial_sum_replicates(const ModelConfig& cfg, std::int64_t n,
                                  int reps, std::uint64_t master_seed,
                                  std::uint64_t stream_base,
                                  std::int64_t burn_in, int threads) {
  require(reps >= 100, ErrorCode::invalid_argument,
          "partial sums require at least 100 replicates");
  require(n >= 1 && burn_in >= 0, ErrorCode::invalid_argument,
          "partial sums require n >= 1 and burn_in >= 0");
  double mu = cfg.offspring.mean();
  if (!(mu < 1.0) || !cfg.immigration.moments().log_moment_finite) {
    ErgodicityReport rep = check_ergodicity(cfg);
    fail(ErrorCode::not_ergodic,
         "config is not ergodic: " + rep.to_json().dump());
  }

  Centering centering = regime_centering(cfg, n);
  SumsReport report;
  report.regime = centering.regime;
  report.center = centering.center;
  report.scale = centering.scale;
  report.n = n;
  report.normalized.resize(static_cast<std::size_t>(reps));

  parallel_for(reps, threads, [&](std::int64_t r) {
    RandomStream rng(master_seed, stream_base + static_cast<std::uint64_t>(r));
    std::uint64_t x = 0;
    for (std::int64_t t = 0; t < burn_in; ++t) x = step(x, cfg, rng);
    double sum = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
      x = step(x, cfg, rng);
      sum += static_cast<double>(x);
    }
    report.normalized[static_cast<std::size_t>(r)] =
        (sum - centering.center) / centering.scale;
  });
  return report;
}

StableDiagnostics stable_diagnostics(std::span<const double> sums_n,
                                     std::span<const double> sums_2n,
                                     double alpha) {
  require(alpha > 0.0 && alpha < 2.0, ErrorCode::invalid_argument,
          "stable diagnostics require alpha in (0,2)");
  require(sums_n.size() >= 100 && sums_2n.size() >= 100,
          ErrorCode::invalid_argument,
          "stable diagnostics require at least 100 replicates per batch");
  std::vector<double> mags;
  mags.reserve(sums_n.size());
  for (double x : sums_n) mags.push_back(std::fabs(x));
  int k = static_cast<int>(
      std::clamp<std::size_t>(sums_n.size() / 10, 10, 200));
  StableDiagnostics diag;
  diag.hill_index = hill_positive(std::move(mags), k).alpha_hat;
  diag.self_similarity_ks =
      ks_two_sample(std::vector<double>(sums_n.begin(), sums_n.end()),
                    std::vector<double>(sums_2n.begin(), sums_2n.end()));
  // An alpha-stable limit has infinite variance; a Hill index way above 2
  // says the normalized sums look light-tailed instead.
  diag.stable_regime_plausible = diag.hill_index <= 3.0;
  return diag;
}

}  // namespace branchtail
