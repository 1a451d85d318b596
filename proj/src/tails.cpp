#include "branchtail/tails.hpp"

#include <algorithm>
#include <cmath>

#include "branchtail/error.hpp"
#include "branchtail/stats.hpp"

namespace branchtail {

double model1_tail_constant(double mu, double alpha) {
  require(mu > 0.0 && mu < 1.0, ErrorCode::invalid_argument,
          "tail constant requires offspring mean in (0,1)");
  require(alpha > 0.0, ErrorCode::invalid_argument,
          "tail constant requires alpha > 0");
  return 1.0 / (1.0 - std::pow(mu, alpha));
}

Model2Constants model2_tail_constants(double mu, double alpha, double c,
                                      double mean_b, int k_max) {
  require(mu > 0.0 && mu < 1.0, ErrorCode::invalid_argument,
          "tail constants require offspring mean in (0,1)");
  require(alpha > 1.0 && alpha < 2.0, ErrorCode::invalid_argument,
          "tail constants require alpha in (1,2)");
  require(c >= 0.0 && mean_b >= 0.0 && std::isfinite(mean_b),
          ErrorCode::invalid_argument,
          "tail constants require c >= 0 and a finite immigration mean");

  auto remainder_bound = [&](int k) {
    // For j > k: d_j <= j mu^{j-1} (each step adds at most mu^{(j-1)alpha}
    // <= mu^{j-1} on top of the contraction), so
    //   sum_{j>k} psi_j <= mean_b sum_{j>k} j mu^{j-1} + c mu^{(k+1)alpha}/(1-mu^alpha)
    // with sum_{j>k} j mu^{j-1} = mu^k (k(1-mu) + 1) / (1-mu)^2.
    double tail_jm = std::pow(mu, k) * (k * (1.0 - mu) + 1.0) /
                     ((1.0 - mu) * (1.0 - mu));
    double mua = std::pow(mu, alpha);
    return mean_b * tail_jm + c * std::pow(mua, k + 1) / (1.0 - mua);
  };

  int cap = k_max;
  if (cap < 0) {
    cap = 8;
    while (remainder_bound(cap) >= 1e-8) {
      cap *= 2;
      require(cap <= (1 << 22), ErrorCode::runtime,
              "tail-constant series failed to converge");
    }
  }

  Model2Constants out;
  out.d.resize(static_cast<std::size_t>(cap) + 1);
  out.psi.resize(static_cast<std::size_t>(cap) + 1);
  out.d[0] = 0.0;
  out.psi[0] = mean_b * 0.0 + c;  // mu^0 = 1
  out.total = out.psi[0];
  for (int k = 1; k <= cap; ++k) {
    out.d[k] = mu * out.d[k - 1] + std::pow(mu, (k - 1) * alpha);
    out.psi[k] = mean_b * out.d[k] + c * std::pow(mu, k * alpha);
    out.total += out.psi[k];
  }
  return out;
}

double norming_sequence(double n, double alpha, double tail_scale) {
  require(n > 0 && alpha > 0 && tail_scale > 0, ErrorCode::invalid_argument,
          "norming sequence requires positive n, alpha and tail scale");
  return std::pow(tail_scale * n, 1.0 / alpha);
}

TailTheory tail_theory(const ModelConfig& cfg) {
  validate_regime(cfg);
  TailTheory out;
  double mu = cfg.offspring.mean();
  switch (cfg.regime) {
    case Regime::model1: {
      out.alpha = cfg.immigration.alpha();
      out.constant = model1_tail_constant(mu, out.alpha);
      out.scale = cfg.immigration.tail_scale() * out.constant;
      return out;
    }
    case Regime::model2: {
      out.alpha = cfg.offspring.alpha();
      double c = model2_immigration_ratio(cfg);
      Model2Constants k = model2_tail_constants(mu, out.alpha, c,
                                                cfg.immigration.mean());
      out.constant = k.total;
      out.scale = cfg.offspring.tail_scale() * k.total;
      return out;
    }
    case Regime::light:
      fail(ErrorCode::invalid_argument,
           "tail theory applies to heavy-tailed regimes only");
  }
  fail(ErrorCode::invalid_argument, "unreachable regime");
}

namespace {

HillEstimate hill_from_logs(std::vector<double> log_values, int k_order) {
  require(k_order >= 10, ErrorCode::invalid_argument,
          "hill estimator requires k >= 10");
  require(log_values.size() > static_cast<std::size_t>(k_order),
          ErrorCode::invalid_argument,
          "hill estimator requires more samples than k");
  std::size_t k = static_cast<std::size_t>(k_order);
  std::nth_element(log_values.begin(), log_values.begin() + k,
                   log_values.end(), std::greater<double>());
  double pivot = log_values[k];
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += log_values[i] - pivot;
  require(s > 0.0, ErrorCode::invalid_argument,
          "hill estimator: top order statistics show no tail variation");
  HillEstimate est;
  est.k = k_order;
  est.alpha_hat = static_cast<double>(k) / s;
  double half = 1.96 * est.alpha_hat / std::sqrt(static_cast<double>(k));
  est.ci_low = est.alpha_hat - half;
  est.ci_high = est.alpha_hat + half;
  return est;
}

}  // namespace

HillEstimate hill(std::span<const std::uint64_t> samples, int k_order) {
  std::vector<double> logs;
  logs.reserve(samples.size());
  for (std::uint64_t x : samples)
    logs.push_back(std::log(static_cast<double>(x) + 0.5));
  return hill_from_logs(std::move(logs), k_order);
}

HillEstimate hill_positive(std::vector<double> magnitudes, int k_order) {
  std::vector<double> logs;
  logs.reserve(magnitudes.size());
  for (double x : magnitudes)
    if (x > 0.0) logs.push_back(std::log(x));
  return hill_from_logs(std::move(logs), k_order);
}

std::vector<RatioPoint> tail_ratio_curve(
    std::span<const std::uint64_t> samples,
    const std::function<double(double)>& ref_tail,
    std::span<const double> probe_quantiles) {
  require(!samples.empty(), ErrorCode::invalid_argument,
          "tail ratio curve: empty sample");
  double n = static_cast<double>(samples.size());
  std::vector<RatioPoint> out;
  out.reserve(probe_quantiles.size());
  for (double q : probe_quantiles) {
    require(q > 0.0 && q < 1.0, ErrorCode::invalid_argument,
            "tail ratio curve: probe quantiles must lie in (0,1)");
    RatioPoint pt;
    pt.probe_quantile = q;
    pt.threshold = empirical_quantile(samples, q);
    std::size_t exceed = 0;
    for (std::uint64_t x : samples)
      if (static_cast<double>(x) > pt.threshold) ++exceed;
    pt.empirical_tail = static_cast<double>(exceed) / n;
    pt.ref_tail = ref_tail(pt.threshold);
    require(pt.ref_tail > 0.0, ErrorCode::invalid_argument,
            "tail ratio curve: reference tail vanished at a probe threshold");
    if (exceed == 0) {
      pt.reliable = false;
      pt.ratio = 0.0;
      pt.std_error = 0.0;
    } else {
      pt.ratio = pt.empirical_tail / pt.ref_tail;
      pt.std_error = std::sqrt(pt.empirical_tail * (1.0 - pt.empirical_tail) / n) /
                     pt.ref_tail;
      pt.reliable = exceed >= 25;
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<RatioPoint> compound_tail_check(const DistributionSpec& offspring,
                                            const DistributionSpec& immigration,
                                            std::span<const double> probe_quantiles,
                                            std::int64_t reps, RandomStream& rng) {
  double mu = offspring.mean();
  require(mu > 0.0 && mu < 1.0, ErrorCode::invalid_argument,
          "compound tail check requires offspring mean in (0,1)");
  require(reps >= 1000, ErrorCode::invalid_argument,
          "compound tail check requires at least 1000 replicates");
  std::vector<std::uint64_t> sums(static_cast<std::size_t>(reps));
  for (std::int64_t r = 0; r < reps; ++r) {
    std::uint64_t b = immigration.sample(rng);
    sums[static_cast<std::size_t>(r)] = thin(b, offspring, rng);
  }
  auto ref = [&](double x) { return immigration.tail_real(x / mu); };
  return tail_ratio_curve(sums, ref, probe_quantiles);
}

}  // namespace branchtail
