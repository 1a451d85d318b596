#include "branchtail/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "branchtail/error.hpp"
#include "branchtail/extremes.hpp"
#include "branchtail/oracle.hpp"
#include "branchtail/parallel.hpp"
#include "branchtail/process.hpp"
#include "branchtail/stats.hpp"
#include "branchtail/sums.hpp"
#include "branchtail/tails.hpp"

namespace branchtail {
namespace {

// ---------------------------------------------------------------------------
// deterministic number formatting (shortest round-trip, no locale)

std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::int64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(int v) { return fmt(static_cast<std::int64_t>(v)); }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// strict config reading: every key must be consumed, defaults are materialized

class Fields {
 public:
  Fields(const nlohmann::json& j, std::string ctx) : in_(j), ctx_(std::move(ctx)) {
    require(j.is_object(), ErrorCode::invalid_argument,
            ctx_ + " must be a JSON object");
  }

  std::string str(const char* key) {
    const nlohmann::json& v = get(key);
    require(v.is_string(), ErrorCode::invalid_argument, bad(key, "a string"));
    out_[key] = v;
    return v.get<std::string>();
  }

  std::uint64_t u64(const char* key) {
    const nlohmann::json& v = get(key);
    require(v.is_number_unsigned() ||
                (v.is_number_integer() && v.get<std::int64_t>() >= 0),
            ErrorCode::invalid_argument, bad(key, "a nonnegative integer"));
    out_[key] = v.get<std::uint64_t>();
    return v.get<std::uint64_t>();
  }

  std::uint64_t u64_or(const char* key, std::uint64_t dflt) {
    if (!in_.contains(key)) {
      out_[key] = dflt;
      return dflt;
    }
    return u64(key);
  }

  std::int64_t integer(const char* key, std::int64_t dflt, std::int64_t lo,
                       std::int64_t hi) {
    if (!in_.contains(key)) {
      out_[key] = dflt;
      return dflt;
    }
    const nlohmann::json& v = get(key);
    require(v.is_number_integer() || v.is_number_unsigned(),
            ErrorCode::invalid_argument, bad(key, "an integer"));
    std::int64_t x = v.get<std::int64_t>();
    require(x >= lo && x <= hi, ErrorCode::invalid_argument,
            ctx_ + ": field \"" + key + "\" must lie in [" + fmt(lo) + ", " +
                fmt(hi) + "]");
    out_[key] = x;
    return x;
  }

  double real(const char* key, double dflt, double lo, double hi) {
    if (!in_.contains(key)) {
      out_[key] = dflt;
      return dflt;
    }
    const nlohmann::json& v = get(key);
    require(v.is_number(), ErrorCode::invalid_argument, bad(key, "a number"));
    double x = v.get<double>();
    require(x >= lo && x <= hi, ErrorCode::invalid_argument,
            ctx_ + ": field \"" + key + "\" must lie in [" + fmt(lo) + ", " +
                fmt(hi) + "]");
    out_[key] = x;
    return x;
  }

  std::vector<double> reals(const char* key, std::vector<double> dflt) {
    if (!in_.contains(key)) {
      out_[key] = dflt;
      return dflt;
    }
    const nlohmann::json& v = get(key);
    require(v.is_array() && !v.empty(), ErrorCode::invalid_argument,
            bad(key, "a nonempty array of numbers"));
    std::vector<double> x;
    for (const auto& e : v) {
      require(e.is_number(), ErrorCode::invalid_argument,
              bad(key, "a nonempty array of numbers"));
      x.push_back(e.get<double>());
    }
    out_[key] = x;
    return x;
  }

  std::vector<int> ints(const char* key, std::vector<int> dflt) {
    if (!in_.contains(key)) {
      out_[key] = dflt;
      return dflt;
    }
    const nlohmann::json& v = get(key);
    require(v.is_array() && !v.empty(), ErrorCode::invalid_argument,
            bad(key, "a nonempty array of integers"));
    std::vector<int> x;
    for (const auto& e : v) {
      require(e.is_number_integer() || e.is_number_unsigned(),
              ErrorCode::invalid_argument,
              bad(key, "a nonempty array of integers"));
      x.push_back(e.get<int>());
    }
    out_[key] = x;
    return x;
  }

  const nlohmann::json& raw(const char* key) { return get(key); }

  void set(const char* key, nlohmann::json v) { out_[key] = std::move(v); }

  nlohmann::json finish() {
    for (auto it = in_.begin(); it != in_.end(); ++it)
      require(out_.contains(it.key()), ErrorCode::invalid_argument,
              ctx_ + ": unknown field \"" + it.key() + "\"");
    return std::move(out_);
  }

 private:
  const nlohmann::json& get(const char* key) {
    require(in_.contains(key), ErrorCode::invalid_argument,
            ctx_ + ": field \"" + key + "\" is required");
    return in_.at(key);
  }

  std::string bad(const char* key, const char* what) const {
    return ctx_ + ": field \"" + key + "\" must be " + what;
  }

  const nlohmann::json& in_;
  std::string ctx_;
  nlohmann::json out_ = nlohmann::json::object();
};

// ---------------------------------------------------------------------------

struct Payload {
  std::string csv;
  nlohmann::json summary;
  std::string digest;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::io, "cannot open " + path.string());
  out << content;
  out.flush();
  require(out.good(), ErrorCode::io, "failed writing " + path.string());
}

// Stationary draws via the backward series, chunked on independent streams so
// the result is a function of (seed) alone, whatever the thread count.
std::vector<std::uint64_t> backward_draws(const ModelConfig& cfg,
                                          std::int64_t count, int depth,
                                          std::uint64_t seed, int threads) {
  const std::int64_t chunk = 65536;
  std::int64_t n_chunks = (count + chunk - 1) / chunk;
  std::vector<std::uint64_t> out(static_cast<std::size_t>(count));
  parallel_for(n_chunks, threads, [&](std::int64_t c) {
    RandomStream rng(seed, static_cast<std::uint64_t>(c));
    std::int64_t first = c * chunk;
    std::int64_t last = std::min(first + chunk, count);
    for (std::int64_t i = first; i < last; ++i)
      out[static_cast<std::size_t>(i)] =
          sample_stationary_backward(cfg, depth, rng);
  });
  return out;
}

nlohmann::json ratio_point_json(const RatioPoint& pt) {
  nlohmann::json j;
  j["probe_quantile"] = pt.probe_quantile;
  j["threshold"] = pt.threshold;
  j["empirical_tail"] = pt.empirical_tail;
  j["ref_tail"] = pt.ref_tail;
  j["ratio"] = pt.ratio;
  j["std_error"] = pt.std_error;
  j["reliable"] = pt.reliable;
  return j;
}

void ratio_point_csv(std::string& csv, const RatioPoint& pt) {
  csv += fmt(pt.probe_quantile);
  csv += ',';
  csv += fmt(pt.threshold);
  csv += ',';
  csv += fmt(pt.empirical_tail);
  csv += ',';
  csv += fmt(pt.ref_tail);
  csv += ',';
  csv += fmt(pt.ratio);
  csv += ',';
  csv += fmt(pt.std_error);
  csv += ',';
  csv += pt.reliable ? '1' : '0';
  csv += '\n';
}

// ---------------------------------------------------------------------------

Payload run_simulate(const nlohmann::json& norm, int /*threads*/) {
  ModelConfig cfg = ModelConfig::from_json(norm.at("model"));
  std::uint64_t seed = norm.at("seed").get<std::uint64_t>();
  std::int64_t length = norm.at("length").get<std::int64_t>();
  std::int64_t burn_in = norm.at("burn_in").get<std::int64_t>();
  std::uint64_t stream = norm.at("stream").get<std::uint64_t>();

  PathSample path = simulate_path(cfg, length, burn_in, seed, stream);

  std::string csv = "t,x\n";
  std::vector<double> vals;
  vals.reserve(path.values.size());
  std::uint64_t max_x = 0;
  for (std::size_t t = 0; t < path.values.size(); ++t) {
    csv += fmt(static_cast<std::uint64_t>(t + 1));
    csv += ',';
    csv += fmt(path.values[t]);
    csv += '\n';
    vals.push_back(static_cast<double>(path.values[t]));
    max_x = std::max(max_x, path.values[t]);
  }

  Payload p;
  p.csv = std::move(csv);
  p.summary["mean"] = mean_of(vals);
  p.summary["variance"] = variance_of(vals);
  p.summary["max"] = max_x;
  p.summary["ergodicity"] = check_ergodicity(cfg).to_json();
  p.digest = "simulate: length=" + fmt(length) +
             " mean=" + short_num(mean_of(vals)) + " max=" + fmt(max_x);
  return p;
}

Payload run_oracle(const nlohmann::json& norm, int threads) {
  ModelConfig cfg = ModelConfig::from_json(norm.at("model"));
  std::uint64_t seed = norm.at("seed").get<std::uint64_t>();
  std::int64_t samples = norm.at("samples").get<std::int64_t>();
  std::int64_t state_cap = norm.at("state_cap").get<std::int64_t>();
  int depth = norm.at("depth").get<int>();
  double pmf_tol = norm.at("pmf_tol").get<double>();
  std::vector<double> pgf_points =
      norm.at("pgf_points").get<std::vector<double>>();

  StationaryOracle exact = stationary_pmf_bruteforce(
      cfg, static_cast<int>(state_cap), pmf_tol);
  std::vector<std::uint64_t> draws =
      backward_draws(cfg, samples, depth, seed, threads);
  std::map<std::uint64_t, double> emp = empirical_pmf(draws);

  std::map<std::uint64_t, double> exact_map;
  for (std::size_t k = 0; k < exact.pmf.size(); ++k)
    if (exact.pmf[k] > 0.0) exact_map[k] = exact.pmf[k];
  double tv = tv_distance(exact_map, emp);

  // restricted comparison: both laws conditioned on {0..state_cap-1}
  double emp_kept = 0.0, exact_kept = 1.0 - exact.mass_deficit;
  for (const auto& [k, w] : emp)
    if (k < static_cast<std::uint64_t>(state_cap)) emp_kept += w;
  double tv_restricted = 0.0;
  if (emp_kept > 0.0 && exact_kept > 0.0) {
    std::map<std::uint64_t, double> a, b;
    for (const auto& [k, w] : exact_map) a[k] = w / exact_kept;
    for (const auto& [k, w] : emp)
      if (k < static_cast<std::uint64_t>(state_cap)) b[k] = w / emp_kept;
    tv_restricted = tv_distance(a, b);
  }

  std::string csv = "state,exact_pmf,empirical_pmf\n";
  for (std::int64_t k = 0; k < state_cap; ++k) {
    auto it = emp.find(static_cast<std::uint64_t>(k));
    csv += fmt(k);
    csv += ',';
    csv += fmt(exact.pmf[static_cast<std::size_t>(k)]);
    csv += ',';
    csv += fmt(it == emp.end() ? 0.0 : it->second);
    csv += '\n';
  }

  Payload p;
  p.csv = std::move(csv);
  p.summary["tv"] = tv;
  p.summary["tv_restricted"] = tv_restricted;
  p.summary["mass_deficit"] = exact.mass_deficit;
  p.summary["power_iterations"] = exact.power_iterations;

  std::vector<double> dv;
  dv.reserve(draws.size());
  for (std::uint64_t x : draws) dv.push_back(static_cast<double>(x));
  nlohmann::json moments;
  if (cfg.variant == Variant::sum &&
      std::isfinite(cfg.offspring.second_moment()) &&
      std::isfinite(cfg.immigration.second_moment())) {
    StationaryMoments sm = stationary_moments(cfg);
    moments["exact_mean"] = sm.mean;
    moments["exact_variance"] = sm.variance;
    moments["empirical_mean"] = mean_of(dv);
    moments["empirical_variance"] = variance_of(dv);
  }
  p.summary["moments"] = moments;

  nlohmann::json pgf = nlohmann::json::array();
  if (cfg.variant == Variant::sum) {
    for (double s : pgf_points) {
      double exact_pgf = stationary_pgf(cfg, s, -1);
      double emp_pgf = 0.0;
      for (std::uint64_t x : draws)
        emp_pgf += std::pow(s, static_cast<double>(x));
      emp_pgf /= static_cast<double>(draws.size());
      nlohmann::json row;
      row["s"] = s;
      row["exact"] = exact_pgf;
      row["empirical"] = emp_pgf;
      pgf.push_back(row);
    }
  }
  p.summary["pgf"] = pgf;

  p.digest = "oracle: tv=" + short_num(tv) +
             " deficit=" + short_num(exact.mass_deficit) +
             " iterations=" + fmt(exact.power_iterations);
  return p;
}

Payload run_tails(const nlohmann::json& norm, int threads) {
  ModelConfig cfg = ModelConfig::from_json(norm.at("model"));
  std::uint64_t seed = norm.at("seed").get<std::uint64_t>();
  std::int64_t samples = norm.at("samples").get<std::int64_t>();
  int depth = norm.at("depth").get<int>();
  int hill_k = norm.at("hill_k").get<int>();
  std::vector<double> probes =
      norm.at("probe_quantiles").get<std::vector<double>>();

  TailTheory theory = tail_theory(cfg);
  const DistributionSpec& driver =
      cfg.regime == Regime::model1 ? cfg.immigration : cfg.offspring;

  std::vector<std::uint64_t> draws =
      backward_draws(cfg, samples, depth, seed, threads);
  auto ref = [&](double x) { return driver.tail_real(x); };
  std::vector<RatioPoint> curve = tail_ratio_curve(draws, ref, probes);
  HillEstimate est = hill(draws, hill_k);

  std::string csv =
      "probe_quantile,threshold,empirical_tail,ref_tail,ratio,target,"
      "std_error,reliable\n";
  for (const RatioPoint& pt : curve) {
    csv += fmt(pt.probe_quantile);
    csv += ',';
    csv += fmt(pt.threshold);
    csv += ',';
    csv += fmt(pt.empirical_tail);
    csv += ',';
    csv += fmt(pt.ref_tail);
    csv += ',';
    csv += fmt(pt.ratio);
    csv += ',';
    csv += fmt(theory.constant);
    csv += ',';
    csv += fmt(pt.std_error);
    csv += ',';
    csv += pt.reliable ? '1' : '0';
    csv += '\n';
  }

  Payload p;
  p.csv = std::move(csv);
  p.summary["alpha"] = theory.alpha;
  p.summary["tail_scale"] = theory.scale;
  p.summary["target_ratio"] = theory.constant;
  nlohmann::json hill_json;
  hill_json["alpha_hat"] = est.alpha_hat;
  hill_json["ci_low"] = est.ci_low;
  hill_json["ci_high"] = est.ci_high;
  hill_json["k"] = est.k;
  p.summary["hill"] = hill_json;
  nlohmann::json pts = nlohmann::json::array();
  for (const RatioPoint& pt : curve) pts.push_back(ratio_point_json(pt));
  p.summary["ratio_curve"] = pts;

  const RatioPoint& mid = curve[curve.size() / 2];
  p.digest = "tails: hill_alpha=" + short_num(est.alpha_hat) + " ratio@" +
             short_num(mid.probe_quantile) + "=" + short_num(mid.ratio) +
             " target=" + short_num(theory.constant);
  return p;
}

Payload run_extremes(const nlohmann::json& norm, int threads) {
  ModelConfig cfg = ModelConfig::from_json(norm.at("model"));
  std::uint64_t seed = norm.at("seed").get<std::uint64_t>();
  std::int64_t n = norm.at("n").get<std::int64_t>();
  std::int64_t burn_in = norm.at("burn_in").get<std::int64_t>();
  std::uint64_t stream = norm.at("stream").get<std::uint64_t>();
  double tq = norm.at("threshold_quantile").get<double>();
  std::int64_t run_gap = norm.at("run_gap").get<std::int64_t>();
  std::int64_t est_block_len = norm.at("est_block_len").get<std::int64_t>();
  std::int64_t maxima_block_len = norm.at("maxima_block_len").get<std::int64_t>();
  std::int64_t n_blocks = norm.at("n_blocks").get<std::int64_t>();
  int max_lag = norm.at("max_lag").get<int>();
  double aq = norm.at("anticluster_quantile").get<double>();
  std::int64_t ar = norm.at("anticluster_r").get<std::int64_t>();
  std::vector<int> ams = norm.at("anticluster_ms").get<std::vector<int>>();
  std::int64_t ic_level = norm.at("intercluster_level").get<std::int64_t>();

  TailTheory theory = tail_theory(cfg);
  double mu = cfg.offspring.mean();
  double theta = theoretical_extremal_index(mu, theory.alpha);

  PathSample path = simulate_path(cfg, n, burn_in, seed, stream);
  const std::vector<std::uint64_t>& v = path.values;

  double threshold = empirical_quantile(v, tq);
  double theta_blocks =
      extremal_index_estimate(v, threshold, ThetaMethod::blocks, est_block_len);
  double theta_runs =
      extremal_index_estimate(v, threshold, ThetaMethod::runs, run_gap);
  auto clusters = decluster(v, threshold, run_gap);
  ClusterSizeFit fit = cluster_size_fit(clusters, mu, theory.alpha);
  auto profile = tail_process_profile(v, tq, max_lag);

  double a_ic = norming_sequence(static_cast<double>(ic_level), theory.alpha,
                                 theory.scale);
  auto ic_clusters = decluster(v, a_ic, run_gap);
  double ic_ks = intercluster_exponential_check(
      ic_clusters, static_cast<double>(ic_level), theta, 1.0);

  double ac_threshold = empirical_quantile(v, aq);
  std::vector<double> ac = anticluster_curve(v, ac_threshold, ar, ams);
  double ac_tail_prob = 0.0;
  for (std::uint64_t x : v)
    if (static_cast<double>(x) > ac_threshold) ac_tail_prob += 1.0;
  ac_tail_prob /= static_cast<double>(v.size());

  std::vector<std::uint64_t> maxima = simulate_block_maxima(
      cfg, maxima_block_len, n_blocks, seed, std::uint64_t{1} << 32, burn_in,
      threads);
  double a_n = norming_sequence(static_cast<double>(maxima_block_len),
                                theory.alpha, theory.scale);
  double frechet_ks = frechet_gof(maxima, a_n, theta, theory.alpha);

  std::string csv = "metric,arg,value,target\n";
  auto row = [&csv](const std::string& metric, const std::string& arg,
                    double value, const std::string& target) {
    csv += metric;
    csv += ',';
    csv += arg;
    csv += ',';
    csv += fmt(value);
    csv += ',';
    csv += target;
    csv += '\n';
  };
  row("theta_runs", "", theta_runs, fmt(theta));
  row("theta_blocks", "", theta_blocks, fmt(theta));
  row("frechet_ks", "", frechet_ks, "");
  row("intercluster_ks", "", ic_ks, "");
  row("cluster_mean", "", fit.mean_size, fmt(fit.target_mean));
  row("cluster_chi_square", "", fit.chi_square, "");
  for (std::size_t k = 0; k < fit.empirical_pmf.size(); ++k)
    row("cluster_pmf", fmt(static_cast<std::uint64_t>(k + 1)),
        fit.empirical_pmf[k], fmt(fit.geometric_pmf[k]));
  for (const LagProfilePoint& pt : profile)
    row("lag_median", fmt(pt.lag), pt.median_ratio,
        fmt(std::pow(mu, pt.lag)));
  for (std::size_t i = 0; i < ams.size(); ++i)
    row("anticluster", fmt(ams[i]), ac[i], "");

  Payload p;
  p.csv = std::move(csv);
  p.summary["alpha"] = theory.alpha;
  p.summary["theta_target"] = theta;
  p.summary["threshold"] = threshold;
  p.summary["theta_blocks"] = theta_blocks;
  p.summary["theta_runs"] = theta_runs;
  nlohmann::json cluster_json;
  cluster_json["count"] = fit.cluster_count;
  cluster_json["mean_size"] = fit.mean_size;
  cluster_json["target_mean"] = fit.target_mean;
  cluster_json["chi_square"] = fit.chi_square;
  cluster_json["empirical_pmf"] = fit.empirical_pmf;
  cluster_json["geometric_pmf"] = fit.geometric_pmf;
  p.summary["clusters"] = cluster_json;
  nlohmann::json lag_json = nlohmann::json::array();
  for (const LagProfilePoint& pt : profile) {
    nlohmann::json r;
    r["lag"] = pt.lag;
    r["median_ratio"] = pt.median_ratio;
    r["target"] = std::pow(mu, pt.lag);
    r["events"] = pt.events;
    lag_json.push_back(r);
  }
  p.summary["tail_process"] = lag_json;
  nlohmann::json ic_json;
  ic_json["level"] = ic_level;
  ic_json["threshold"] = a_ic;
  ic_json["clusters"] = static_cast<std::int64_t>(ic_clusters.size());
  ic_json["ks"] = ic_ks;
  p.summary["intercluster"] = ic_json;
  nlohmann::json ac_json;
  ac_json["threshold"] = ac_threshold;
  ac_json["tail_prob"] = ac_tail_prob;
  ac_json["r"] = ar;
  ac_json["ms"] = ams;
  ac_json["curve"] = ac;
  p.summary["anticluster"] = ac_json;
  nlohmann::json fre_json;
  fre_json["block_len"] = maxima_block_len;
  fre_json["n_blocks"] = n_blocks;
  fre_json["a_n"] = a_n;
  fre_json["ks"] = frechet_ks;
  p.summary["frechet"] = fre_json;

  p.digest = "extremes: theta_runs=" + short_num(theta_runs) +
             " theta_blocks=" + short_num(theta_blocks) +
             " target=" + short_num(theta) +
             " frechet_ks=" + short_num(frechet_ks);
  return p;
}

Payload run_sums(const nlohmann::json& norm, int threads) {
  ModelConfig cfg = ModelConfig::from_json(norm.at("model"));
  std::uint64_t seed = norm.at("seed").get<std::uint64_t>();
  std::int64_t n = norm.at("n").get<std::int64_t>();
  int reps = norm.at("reps").get<int>();
  std::int64_t burn_in = norm.at("burn_in").get<std::int64_t>();
  std::int64_t lrv_n = norm.at("lrv_n").get<std::int64_t>();
  int max_lag = norm.at("max_lag").get<int>();

  SumsReport rn = partial_sum_replicates(cfg, n, reps, seed, 0, burn_in, threads);
  SumsReport r2n = partial_sum_replicates(
      cfg, 2 * n, reps, seed, static_cast<std::uint64_t>(reps), burn_in, threads);

  std::string csv = "rep,normalized_n,normalized_2n\n";
  for (int r = 0; r < reps; ++r) {
    csv += fmt(r);
    csv += ',';
    csv += fmt(rn.normalized[static_cast<std::size_t>(r)]);
    csv += ',';
    csv += fmt(r2n.normalized[static_cast<std::size_t>(r)]);
    csv += '\n';
  }

  Payload p;
  p.csv = std::move(csv);
  const char* regime_name = rn.regime == SumRegime::gaussian ? "gaussian"
                            : rn.regime == SumRegime::stable_low
                                ? "stable_low"
                                : "stable_mid";
  p.summary["regime"] = regime_name;
  p.summary["center"] = rn.center;
  p.summary["scale"] = rn.scale;

  if (rn.regime == SumRegime::gaussian) {
    PathSample lrv_path = simulate_path(cfg, lrv_n, burn_in, seed,
                                        2 * static_cast<std::uint64_t>(reps));
    double lrv = long_run_variance(lrv_path.values, max_lag);
    double sigma = std::sqrt(lrv);
    double ks = ks_statistic(rn.normalized,
                             [sigma](double x) { return normal_cdf(x / sigma); });
    p.summary["long_run_variance"] = lrv;
    p.summary["ks_normal"] = ks;
    p.summary["normalized_variance"] = variance_of(rn.normalized);
    p.digest = "sums: regime=gaussian ks_normal=" + short_num(ks) +
               " lrv=" + short_num(lrv);
  } else {
    Centering c = regime_centering(cfg, n);
    StableDiagnostics diag =
        stable_diagnostics(rn.normalized, r2n.normalized, c.alpha);
    p.summary["hill_index"] = diag.hill_index;
    p.summary["self_similarity_ks"] = diag.self_similarity_ks;
    p.summary["stable_regime_plausible"] = diag.stable_regime_plausible;
    p.digest = std::string("sums: regime=") + regime_name +
               " hill=" + short_num(diag.hill_index) +
               " selfsim_ks=" + short_num(diag.self_similarity_ks);
  }
  return p;
}

Payload run_compound(const nlohmann::json& norm, int /*threads*/) {
  ModelConfig cfg = ModelConfig::from_json(norm.at("model"));
  std::uint64_t seed = norm.at("seed").get<std::uint64_t>();
  std::int64_t reps = norm.at("reps").get<std::int64_t>();
  std::uint64_t stream = norm.at("stream").get<std::uint64_t>();
  std::vector<double> probes =
      norm.at("probe_quantiles").get<std::vector<double>>();

  RandomStream rng(seed, stream);
  std::vector<RatioPoint> curve =
      compound_tail_check(cfg.offspring, cfg.immigration, probes, reps, rng);

  std::string csv =
      "probe_quantile,threshold,empirical_tail,ref_tail,ratio,std_error,"
      "reliable\n";
  for (const RatioPoint& pt : curve) ratio_point_csv(csv, pt);

  Payload p;
  p.csv = std::move(csv);
  p.summary["mu"] = cfg.offspring.mean();
  nlohmann::json pts = nlohmann::json::array();
  for (const RatioPoint& pt : curve) pts.push_back(ratio_point_json(pt));
  p.summary["ratio_curve"] = pts;
  const RatioPoint& last = curve.back();
  p.digest = "compound: ratio@" + short_num(last.probe_quantile) + "=" +
             short_num(last.ratio) + " (target 1)";
  return p;
}

}  // namespace

nlohmann::json validate_config(const nlohmann::json& config) {
  Fields f(config, "config");
  std::string exp = f.str("experiment");
  require(exp == "simulate" || exp == "oracle" || exp == "tails" ||
              exp == "extremes" || exp == "sums" || exp == "compound",
          ErrorCode::invalid_argument,
          "config: experiment must be one of simulate, oracle, tails, "
          "extremes, sums, compound");
  ModelConfig cfg = ModelConfig::from_json(f.raw("model"));
  validate_regime(cfg);
  f.set("model", cfg.to_json());
  f.u64("seed");

  std::int64_t n_sums = 0;
  if (exp == "simulate") {
    f.integer("length", 10000, 1, std::int64_t{1} << 40);
    f.integer("burn_in", 1000, 0, std::int64_t{1} << 32);
    f.u64_or("stream", 0);
  } else if (exp == "oracle") {
    f.integer("samples", 20000, 100, std::int64_t{1} << 32);
    f.integer("state_cap", 256, 2, 2048);
    f.integer("depth", -1, -1, 100000);
    f.real("pmf_tol", 0.05, 0.0, 1.0);
    std::vector<double> pts = f.reals("pgf_points", {0.0, 0.25, 0.5, 0.75, 0.9});
    for (double s : pts)
      require(s >= 0.0 && s <= 1.0, ErrorCode::invalid_argument,
              "config: pgf_points must lie in [0,1]");
  } else if (exp == "tails") {
    std::int64_t samples = f.integer("samples", 200000, 1000, std::int64_t{1} << 32);
    f.integer("depth", -1, -1, 100000);
    std::int64_t hill_k = f.integer("hill_k", 0, 0, std::int64_t{1} << 24);
    if (hill_k == 0)
      f.set("hill_k", std::max<std::int64_t>(10, samples / 1000));
    else
      require(hill_k >= 10, ErrorCode::invalid_argument,
              "config: hill_k must be 0 (auto) or >= 10");
    std::vector<double> probes =
        f.reals("probe_quantiles", {0.99, 0.999, 0.9999});
    for (double q : probes)
      require(q > 0.0 && q < 1.0, ErrorCode::invalid_argument,
              "config: probe_quantiles must lie in (0,1)");
  } else if (exp == "extremes") {
    std::int64_t n = f.integer("n", 1000000, 10000, std::int64_t{1} << 40);
    f.integer("burn_in", 1000, 0, std::int64_t{1} << 32);
    f.u64_or("stream", 0);
    double tq = f.real("threshold_quantile", 0.999, 0.99, 0.99999);
    std::int64_t run_gap =
        f.integer("run_gap", 0, 0, std::int64_t{1} << 24);
    if (run_gap == 0)
      f.set("run_gap", static_cast<std::int64_t>(
                           std::ceil(std::log(static_cast<double>(n)))));
    std::int64_t ebl = f.integer("est_block_len", 0, 0, std::int64_t{1} << 24);
    if (ebl == 0)
      f.set("est_block_len",
            static_cast<std::int64_t>(std::ceil(0.1 / (1.0 - tq))));
    f.integer("maxima_block_len", 10000, 100, std::int64_t{1} << 32);
    f.integer("n_blocks", 500, 50, std::int64_t{1} << 24);
    f.integer("max_lag", 4, 1, 64);
    f.real("anticluster_quantile", 0.9995, 0.99, 0.999999);
    std::int64_t ar = f.integer("anticluster_r", 0, 0, std::int64_t{1} << 24);
    if (ar == 0) {
      ar = static_cast<std::int64_t>(
          std::floor(std::pow(static_cast<double>(n), 0.4)));
      f.set("anticluster_r", ar);
    }
    require(ar >= 2 && ar < n, ErrorCode::invalid_argument,
            "config: anticluster_r must lie in [2, n)");
    std::vector<int> ams = f.ints("anticluster_ms", {1, 2, 5, 10, 20});
    for (std::size_t i = 0; i < ams.size(); ++i) {
      require(ams[i] >= 1 && ams[i] <= ar, ErrorCode::invalid_argument,
              "config: anticluster_ms entries must lie in [1, anticluster_r]");
      require(i == 0 || ams[i] > ams[i - 1], ErrorCode::invalid_argument,
              "config: anticluster_ms must be strictly increasing");
    }
    std::int64_t icl =
        f.integer("intercluster_level", 0, 0, std::int64_t{1} << 40);
    if (icl == 0)
      f.set("intercluster_level", std::max<std::int64_t>(100, n / 1000));
    else
      require(icl >= 100 && icl <= n, ErrorCode::invalid_argument,
              "config: intercluster_level must lie in [100, n]");
  } else if (exp == "sums") {
    n_sums = f.integer("n", 10000, 16, std::int64_t{1} << 36);
    f.integer("reps", 400, 100, 1 << 20);
    f.integer("burn_in", 1000, 0, std::int64_t{1} << 32);
    std::int64_t lrv_n = f.integer("lrv_n", 65536, 1000, std::int64_t{1} << 32);
    std::int64_t lag = f.integer("max_lag", 0, 0, 1 << 16);
    if (lag == 0)
      f.set("max_lag", static_cast<std::int64_t>(std::ceil(
                           10.0 * std::log10(static_cast<double>(lrv_n)))));
  } else if (exp == "compound") {
    f.integer("reps", 200000, 1000, std::int64_t{1} << 32);
    f.u64_or("stream", 0);
    std::vector<double> probes =
        f.reals("probe_quantiles", {0.99, 0.999, 0.9999});
    for (double q : probes)
      require(q > 0.0 && q < 1.0, ErrorCode::invalid_argument,
              "config: probe_quantiles must lie in (0,1)");
  }

  nlohmann::json norm = f.finish();

  ErgodicityReport rep = check_ergodicity(cfg);
  require(rep.ergodic, ErrorCode::not_ergodic,
          "config is not ergodic: " + rep.to_json().dump());

  if (exp == "tails" || exp == "extremes") tail_theory(cfg);
  if (exp == "sums") regime_centering(cfg, n_sums);
  if (exp == "compound") {
    double mu = cfg.offspring.mean();
    require(mu > 0.0 && mu < 1.0, ErrorCode::invalid_argument,
            "compound experiment requires offspring mean in (0,1)");
    require(cfg.immigration.heavy_tailed(), ErrorCode::invalid_argument,
            "compound experiment requires heavy-tailed immigration");
  }
  return norm;
}

ExperimentResult run_experiment(const nlohmann::json& config,
                                const std::string& out_dir,
                                std::optional<std::uint64_t> seed_override,
                                int threads) {
  nlohmann::json norm = validate_config(config);
  if (seed_override) norm["seed"] = *seed_override;
  std::string exp = norm.at("experiment").get<std::string>();

  Payload payload;
  if (exp == "simulate")
    payload = run_simulate(norm, threads);
  else if (exp == "oracle")
    payload = run_oracle(norm, threads);
  else if (exp == "tails")
    payload = run_tails(norm, threads);
  else if (exp == "extremes")
    payload = run_extremes(norm, threads);
  else if (exp == "sums")
    payload = run_sums(norm, threads);
  else
    payload = run_compound(norm, threads);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, ErrorCode::io, "cannot create output directory " + out_dir);

  nlohmann::json summary;
  summary["experiment"] = exp;
  summary["config"] = norm;
  summary["results"] = payload.summary;
  summary["digest"] = payload.digest;

  std::filesystem::path dir(out_dir);
  std::filesystem::path csv_path = dir / (exp + ".csv");
  std::filesystem::path summary_path = dir / (exp + ".summary.json");
  write_file(csv_path, payload.csv);
  write_file(summary_path, summary.dump(2) + "\n");

  ExperimentResult result;
  result.experiment = exp;
  result.digest = payload.digest;
  result.summary = std::move(summary);
  result.files = {csv_path.string(), summary_path.string()};
  return result;
}

}  // namespace branchtail
