#include "branchtail/process.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace branchtail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool light_family(const DistributionSpec& d) { return !d.heavy_tailed(); }

// Adaptive Simpson on [a,b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0)
    fail(ErrorCode::runtime, "ergodicity quadrature failed to converge");
  if (std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, tol, 48);
}

}  // namespace

nlohmann::json ModelConfig::to_json() const {
  nlohmann::json j;
  j["offspring"] = offspring.to_json();
  j["immigration"] = immigration.to_json();
  j["variant"] = variant == Variant::sum ? "sum" : "max";
  j["regime"] = regime == Regime::model1   ? "model1"
                : regime == Regime::model2 ? "model2"
                                           : "light";
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::invalid_argument, "model must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string k = it.key();
    require(k == "offspring" || k == "immigration" || k == "variant" || k == "regime",
            ErrorCode::invalid_argument, "model: unknown field \"" + k + "\"");
  }
  require(j.contains("offspring") && j.contains("immigration") && j.contains("regime"),
          ErrorCode::invalid_argument,
          "model: fields \"offspring\", \"immigration\", \"regime\" are required");
  ModelConfig cfg;
  cfg.offspring = DistributionSpec::from_json(j.at("offspring"));
  cfg.immigration = DistributionSpec::from_json(j.at("immigration"));
  if (j.contains("variant")) {
    std::string v = j.at("variant").get<std::string>();
    require(v == "sum" || v == "max", ErrorCode::invalid_argument,
            "model: variant must be \"sum\" or \"max\"");
    cfg.variant = v == "sum" ? Variant::sum : Variant::max;
  }
  std::string r = j.at("regime").get<std::string>();
  require(r == "model1" || r == "model2" || r == "light", ErrorCode::invalid_argument,
          "model: regime must be \"model1\", \"model2\" or \"light\"");
  cfg.regime = r == "model1" ? Regime::model1
              : r == "model2" ? Regime::model2
                              : Regime::light;
  return cfg;
}

void validate_regime(const ModelConfig& cfg) {
  double mu = cfg.offspring.mean();
  switch (cfg.regime) {
    case Regime::model1: {
      require(mu > 0 && mu < 1, ErrorCode::invalid_argument,
              "model1 regime requires offspring mean in (0,1)");
      require(std::isfinite(cfg.offspring.second_moment()), ErrorCode::invalid_argument,
              "model1 regime requires a finite offspring second moment");
      require(cfg.immigration.family() == Family::discrete_pareto,
              ErrorCode::invalid_argument,
              "model1 regime requires discrete_pareto immigration");
      double a = cfg.immigration.alpha();
      require(a > 0 && a < 2, ErrorCode::invalid_argument,
              "model1 regime requires immigration alpha in (0,2)");
      break;
    }
    case Regime::model2: {
      require(cfg.offspring.family() == Family::zero_inflated_pareto,
              ErrorCode::invalid_argument,
              "model2 regime requires zero_inflated_pareto offspring");
      double a = cfg.offspring.alpha();
      require(a > 1 && a < 2, ErrorCode::invalid_argument,
              "model2 regime requires offspring alpha in (1,2)");
      require(cfg.offspring.q() > 0, ErrorCode::invalid_argument,
              "model2 regime requires a nondegenerate offspring tail (q > 0)");
      require(mu > 0 && mu < 1, ErrorCode::invalid_argument,
              "model2 regime requires offspring mean in (0,1)");
      if (cfg.immigration.heavy_tailed()) {
        require(cfg.immigration.alpha() == a, ErrorCode::invalid_argument,
                "model2 regime requires heavy immigration to share the offspring "
                "tail index");
      } else {
        require(std::isfinite(cfg.immigration.second_moment()),
                ErrorCode::invalid_argument,
                "model2 regime requires light immigration to have a finite second "
                "moment");
      }
      break;
    }
    case Regime::light: {
      require(mu < 1, ErrorCode::invalid_argument,
              "light regime requires offspring mean < 1");
      require(std::isfinite(cfg.offspring.second_moment()), ErrorCode::invalid_argument,
              "light regime requires a finite offspring second moment");
      require(std::isfinite(cfg.immigration.second_moment()),
              ErrorCode::invalid_argument,
              "light regime requires a finite immigration second moment");
      break;
    }
  }
}

double model2_immigration_ratio(const ModelConfig& cfg) {
  require(cfg.regime == Regime::model2, ErrorCode::invalid_argument,
          "immigration/offspring tail ratio is defined for model2 configs");
  if (!cfg.immigration.heavy_tailed()) return 0.0;
  return cfg.immigration.tail_scale() / cfg.offspring.tail_scale();
}

nlohmann::json ErgodicityReport::to_json() const {
  nlohmann::json j;
  j["mu"] = std::isfinite(mu) ? nlohmann::json(mu) : nlohmann::json("inf");
  j["log_moment_ok"] = log_moment_ok;
  j["fw_integral"] =
      std::isfinite(fw_integral) ? nlohmann::json(fw_integral) : nlohmann::json("inf");
  j["ergodic"] = ergodic;
  return j;
}

ErgodicityReport check_ergodicity(const ModelConfig& cfg) {
  ErgodicityReport rep;
  rep.mu = cfg.offspring.mean();
  rep.log_moment_ok = cfg.immigration.moments().log_moment_finite;

  if (!(rep.mu < 1.0)) {
    // At criticality and beyond the drift integral diverges; no quadrature.
    rep.fw_integral = kInf;
    rep.ergodic = false;
    return rep;
  }

  const double delta = 1e-6;
  const DistributionSpec& A = cfg.offspring;
  const DistributionSpec& B = cfg.immigration;
  auto integrand = [&](double s) {
    double denom = A.pgf(s) - s;
    double numer = 1.0 - B.pgf(s);
    if (numer <= 0.0) return 0.0;
    if (denom <= 0.0) return kInf;
    return numer / denom;
  };
  double body = integrate(integrand, 0.0, 1.0 - delta, 1e-9);

  // Endpoint sliver [1-delta, 1] bounded via f(s) - s >= (1-mu)(1-s):
  // integral <= 1/(1-mu) * int_0^delta (1 - g(1-w))/w dw, with the inner
  // integral evaluated from the immigration tail behaviour.
  double endpoint;
  double mean_b = B.mean();
  if (std::isfinite(mean_b)) {
    endpoint = mean_b * delta / (1.0 - rep.mu);
  } else {
    // Pareto-type immigration with alpha <= 1: 1-g(1-w) ~ Gamma(1-a) c w^a,
    // and for alpha == 1 it is ~ c w log(1/w).
    double a = B.alpha();
    double c = B.tail_scale();
    if (a == 1.0)
      endpoint = c * delta * (1.0 + std::log(1.0 / delta)) / (1.0 - rep.mu);
    else
      endpoint = c * std::tgamma(1.0 - a) * std::pow(delta, a) / (a * (1.0 - rep.mu));
  }

  rep.fw_integral = body + endpoint;
  rep.ergodic = rep.log_moment_ok && std::isfinite(rep.fw_integral);
  return rep;
}

std::uint64_t thin_generic(std::uint64_t x, const DistributionSpec& offspring,
                           RandomStream& rng) {
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i < x; ++i) s += offspring.sample(rng);
  return s;
}

std::uint64_t thin(std::uint64_t x, const DistributionSpec& offspring,
                   RandomStream& rng) {
  if (x == 0) return 0;
  switch (offspring.family()) {
    case Family::dirac: {
      std::uint64_t v = offspring.value();
      if (v != 0 && x > std::numeric_limits<std::uint64_t>::max() / v)
        fail(ErrorCode::runtime, "thinning overflow with dirac offspring");
      return x * v;
    }
    case Family::bernoulli:
      return binomial_draw(x, offspring.p(), rng);
    case Family::binomial: {
      std::uint64_t m = offspring.m();
      if (m != 0 && x > std::numeric_limits<std::uint64_t>::max() / m)
        fail(ErrorCode::runtime, "thinning overflow with binomial offspring");
      return binomial_draw(x * m, offspring.p(), rng);
    }
    case Family::poisson:
      return poisson_draw(static_cast<double>(x) * offspring.lambda(), rng);
    case Family::geometric:
      return negative_binomial_draw(x, offspring.p(), rng);
    default:
      return thin_generic(x, offspring, rng);
  }
}

std::uint64_t step(std::uint64_t state, const ModelConfig& cfg, RandomStream& rng) {
  std::uint64_t offspring_total = thin(state, cfg.offspring, rng);
  std::uint64_t b = cfg.immigration.sample(rng);
  if (cfg.variant == Variant::max) return std::max(offspring_total, b);
  if (offspring_total > std::numeric_limits<std::uint64_t>::max() - b)
    fail(ErrorCode::runtime, "state overflow in sum recursion");
  return offspring_total + b;
}

PathSample simulate_path(const ModelConfig& cfg, std::int64_t length,
                         std::int64_t burn_in, std::uint64_t master_seed,
                         std::uint64_t stream) {
  require(length >= 0 && burn_in >= 0, ErrorCode::invalid_argument,
          "simulate_path: length and burn_in must be nonnegative");
  double mu = cfg.offspring.mean();
  if (!(mu < 1.0) || !cfg.immigration.moments().log_moment_finite) {
    ErgodicityReport rep = check_ergodicity(cfg);
    fail(ErrorCode::not_ergodic,
         "config is not ergodic: " + rep.to_json().dump());
  }
  PathSample path;
  path.burn_in = burn_in;
  path.master_seed = master_seed;
  path.stream = stream;
  path.config = cfg;
  path.values.resize(static_cast<std::size_t>(length));
  RandomStream rng(master_seed, stream);
  std::uint64_t x = 0;
  for (std::int64_t t = 0; t < burn_in; ++t) x = step(x, cfg, rng);
  for (std::int64_t t = 0; t < length; ++t) {
    x = step(x, cfg, rng);
    path.values[static_cast<std::size_t>(t)] = x;
  }
  return path;
}

std::uint64_t sample_iterated_thinning(int k, const DistributionSpec& offspring,
                                       RandomStream& rng) {
  require(k >= 0, ErrorCode::invalid_argument, "iterated thinning: k must be >= 0");
  std::uint64_t x = 1;
  for (int i = 0; i < k && x > 0; ++i) x = thin(x, offspring, rng);
  return x;
}

std::uint64_t sample_stationary_backward(const ModelConfig& cfg, int depth,
                                         RandomStream& rng) {
  double mu = cfg.offspring.mean();
  int k_max;
  int guard = 0;
  if (depth >= 0) {
    k_max = depth;
  } else {
    require(mu < 1.0, ErrorCode::not_ergodic,
            "backward sampler requires offspring mean < 1");
    if (mu <= 0.0) {
      k_max = 0;
    } else {
      k_max = static_cast<int>(std::ceil(std::log(1e-6) / std::log(mu)));
      k_max = std::max(k_max, 1);
      guard = static_cast<int>(std::ceil(std::log(10.0) / -std::log(mu)));
      require(k_max <= 100000, ErrorCode::invalid_argument,
              "backward sampler: offspring mean too close to 1");
    }
  }

  if (cfg.variant == Variant::max) {
    // Thinning a maximum equals the maximum of prefix sums over one shared
    // offspring sequence, so the terms of the sup series must share their
    // thinning operators.  Iterating forward from an empty state realises
    // exactly that coupling; thinning each cohort independently would give a
    // stochastically larger law.  Cohort j of k_max+1 ends up thinned
    // k_max - j times, so the deepest terms are the earliest cohorts; their
    // surviving maximum is tracked through a thin-split (prefix + remainder)
    // to drive the same trailing-window doubling rule as the sum variant.
    for (;;) {
      std::uint64_t x = 0;
      std::uint64_t oldest = 0;  // max over the first `guard` cohorts
      bool tracking = false;
      for (int j = 0; j <= k_max; ++j) {
        if (depth < 0 && guard > 0 && j == guard) {
          oldest = x;
          tracking = true;
        }
        std::uint64_t b = cfg.immigration.sample(rng);
        if (tracking) {
          std::uint64_t head = thin(oldest, cfg.offspring, rng);
          std::uint64_t rest = thin(x - oldest, cfg.offspring, rng);
          if (head > std::numeric_limits<std::uint64_t>::max() - rest)
            fail(ErrorCode::runtime, "overflow in backward series");
          x = std::max(head + rest, b);
          oldest = head;
        } else {
          x = std::max(thin(x, cfg.offspring, rng), b);
        }
      }
      if (depth >= 0 || guard == 0 || oldest == 0) return x;
      // The deepest cohorts are still alive: double the depth and retry.
      require(k_max <= 50000, ErrorCode::runtime,
              "backward series failed to die out");
      k_max *= 2;
    }
  }

  std::uint64_t acc = 0;
  int tail_nonzero = 0;  // nonzero terms among the trailing `guard` depths
  for (int k = 0; k <= k_max; ++k) {
    std::uint64_t c = cfg.immigration.sample(rng);
    for (int i = 0; i < k && c > 0; ++i) c = thin(c, cfg.offspring, rng);
    if (acc > std::numeric_limits<std::uint64_t>::max() - c)
      fail(ErrorCode::runtime, "overflow in backward series");
    acc += c;
    if (guard > 0 && k > k_max - guard && c != 0) ++tail_nonzero;
    if (depth < 0 && guard > 0 && k == k_max && tail_nonzero > 0) {
      // The truncation window is still active: double the depth.
      require(k_max <= 50000, ErrorCode::runtime,
              "backward series failed to die out");
      k_max *= 2;
      tail_nonzero = 0;
    }
  }
  return acc;
}

}  // namespace branchtail
