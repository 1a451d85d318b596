#include "branchtail/oracle.hpp"

#include <cmath>
#include <limits>

namespace branchtail {

double iterate_pgf(const DistributionSpec& offspring, int k, double s) {
  require(k >= 0, ErrorCode::invalid_argument, "pgf iteration: k must be >= 0");
  require(s >= 0.0 && s <= 1.0, ErrorCode::invalid_argument,
          "pgf argument must lie in [0,1]");
  double t = s;
  for (int i = 0; i < k; ++i) t = offspring.pgf(t);
  return t;
}

double stationary_pgf(const ModelConfig& cfg, double s, int depth) {
  require(cfg.variant == Variant::sum, ErrorCode::invalid_argument,
          "stationary pgf product applies to the sum recursion");
  require(s >= 0.0 && s <= 1.0, ErrorCode::invalid_argument,
          "pgf argument must lie in [0,1]");
  double mu = cfg.offspring.mean();
  if (depth < 0) {
    require(mu < 1.0, ErrorCode::not_ergodic,
            "automatic pgf depth requires offspring mean < 1");
  }
  double prod = 1.0;
  double t = s;
  int k = 0;
  for (;;) {
    double g = cfg.immigration.pgf(t);
    prod *= g;
    if (depth >= 0) {
      if (k == depth) break;
    } else if (1.0 - g < 1e-15 && k > 0) {
      break;  // remaining factors are within rounding of 1
    }
    require(k < 200000, ErrorCode::runtime,
            "stationary pgf product failed to converge");
    t = cfg.offspring.pgf(t);
    ++k;
  }
  return prod;
}

MomentWithBound exact_m2(const DistributionSpec& offspring, int k) {
  require(k >= 0, ErrorCode::invalid_argument, "moment recursion: k must be >= 0");
  double ea2 = offspring.second_moment();
  require(std::isfinite(ea2), ErrorCode::invalid_argument,
          "second-moment recursion requires a finite offspring second moment");
  double mu = offspring.mean();
  double var_a = ea2 - mu * mu;
  // Var_k = mu Var_{k-1} + Var(A) mu^{2(k-1)}, started from Var_0 = 0.
  double var = 0.0;
  for (int i = 1; i <= k; ++i)
    var = mu * var + var_a * std::pow(mu, 2.0 * (i - 1));
  MomentWithBound out;
  out.exact = var + std::pow(mu, 2.0 * k);
  out.bound = ea2 * (k + 1) * std::pow(mu, k);
  return out;
}

MomentWithBound exact_m3(const DistributionSpec& offspring, int k) {
  require(k >= 0, ErrorCode::invalid_argument, "moment recursion: k must be >= 0");
  double ea3 = offspring.third_moment();
  require(std::isfinite(ea3), ErrorCode::invalid_argument,
          "third-moment recursion requires a finite offspring third moment");
  double mu = offspring.mean();
  require(mu < 1.0, ErrorCode::invalid_argument,
          "third-moment bound requires offspring mean < 1");
  double ea2 = offspring.second_moment();
  // Raw moments of the k-fold iterated thinning of a unit mass, via
  // E[S^3 | N] = N EA3 + 3 N(N-1) EA2 EA + N(N-1)(N-2) (EA)^3 for random sums.
  double m1 = 1.0, m2 = 1.0, m3 = 1.0;
  for (int i = 1; i <= k; ++i) {
    double n1 = m1, n2 = m2, n3 = m3;
    m1 = mu * n1;
    m2 = (ea2 - mu * mu) * n1 + mu * mu * n2;
    m3 = ea3 * n1 + 3.0 * ea2 * mu * (n2 - n1) +
         mu * mu * mu * (n3 - 3.0 * n2 + 2.0 * n1);
  }
  MomentWithBound out;
  double muk = std::pow(mu, k);
  out.exact = m3;
  out.bound = muk * ea3 + ea3 * k * std::pow(mu, 2.0 * k) +
              3.0 * ea2 * ea2 * static_cast<double>(k) * k * muk;
  return out;
}

StationaryMoments stationary_moments(const ModelConfig& cfg) {
  require(cfg.variant == Variant::sum, ErrorCode::invalid_argument,
          "closed-form stationary moments apply to the sum recursion");
  double mu = cfg.offspring.mean();
  require(mu < 1.0, ErrorCode::not_ergodic,
          "stationary moments require offspring mean < 1");
  double ea2 = cfg.offspring.second_moment();
  double eb = cfg.immigration.mean();
  double eb2 = cfg.immigration.second_moment();
  StationaryMoments out;
  out.mean = eb / (1.0 - mu);
  // A diverging input moment only poisons the fields that depend on it.
  if (!std::isfinite(ea2) || !std::isfinite(eb) || !std::isfinite(eb2)) {
    out.variance = std::numeric_limits<double>::infinity();
    return out;
  }
  double var_a = ea2 - mu * mu;
  double var_b = eb2 - eb * eb;
  out.variance = (var_a * out.mean + var_b) / (1.0 - mu * mu);
  return out;
}

namespace {

// pmf of `dist` truncated to {0..cap-1}; appends the overflow mass to deficit.
std::vector<double> truncated_pmf(const DistributionSpec& dist, std::size_t cap,
                                  double& deficit) {
  std::vector<double> p(cap, 0.0);
  double total = 0.0;
  for (std::size_t n = 0; n < cap; ++n) {
    p[n] = dist.pmf(n);
    total += p[n];
  }
  deficit += std::max(0.0, 1.0 - total);
  return p;
}

// out = conv(u, v) truncated to cap; overflow mass added to deficit.
void convolve_into(const std::vector<double>& u, const std::vector<double>& v,
                   std::vector<double>& out, double& deficit) {
  std::size_t cap = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  double kept = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < cap; ++i) {
    if (u[i] == 0.0) continue;
    mass += u[i];
    for (std::size_t j = 0; j < cap; ++j) {
      if (v[j] == 0.0) continue;
      if (i + j < cap) {
        out[i + j] += u[i] * v[j];
        kept += u[i] * v[j];
      }
    }
  }
  deficit += std::max(0.0, mass - kept);
}

}  // namespace

StationaryOracle stationary_pmf_bruteforce(const ModelConfig& cfg,
                                           int state_cap, double tol) {
  require(state_cap >= 2 && state_cap <= 2048, ErrorCode::invalid_argument,
          "stationary pmf oracle: state_cap must lie in [2, 2048]");
  double mu = cfg.offspring.mean();
  require(mu < 1.0, ErrorCode::not_ergodic,
          "stationary pmf oracle requires offspring mean < 1");

  const std::size_t cap = static_cast<std::size_t>(state_cap);
  double row_deficit = 0.0;
  std::vector<double> a = truncated_pmf(cfg.offspring, cap, row_deficit);
  std::vector<double> b = truncated_pmf(cfg.immigration, cap, row_deficit);

  // rows[x] = pmf of the thinning of x individuals, truncated to {0..cap-1}.
  std::vector<std::vector<double>> rows(cap);
  rows[0].assign(cap, 0.0);
  rows[0][0] = 1.0;
  for (std::size_t x = 1; x < cap; ++x) {
    rows[x].assign(cap, 0.0);
    convolve_into(rows[x - 1], a, rows[x], row_deficit);
  }

  std::vector<double> b_cdf(cap);
  {
    double acc = 0.0;
    for (std::size_t n = 0; n < cap; ++n) {
      acc += b[n];
      b_cdf[n] = acc;
    }
  }

  std::vector<double> pi(cap, 0.0), mix(cap, 0.0), next(cap, 0.0);
  pi[0] = 1.0;
  double step_deficit = 0.0;
  int iter = 0;
  for (;; ++iter) {
    require(iter < 100000, ErrorCode::runtime,
            "stationary pmf oracle failed to converge");
    // mix = distribution of the thinned previous state.
    std::fill(mix.begin(), mix.end(), 0.0);
    for (std::size_t x = 0; x < cap; ++x) {
      if (pi[x] == 0.0) continue;
      const std::vector<double>& r = rows[x];
      for (std::size_t y = 0; y < cap; ++y) mix[y] += pi[x] * r[y];
    }
    step_deficit = 0.0;
    if (cfg.variant == Variant::sum) {
      convolve_into(mix, b, next, step_deficit);
    } else {
      double mix_cum = 0.0;
      for (std::size_t y = 0; y < cap; ++y) {
        // P(max = y) = P(U = y) P(V <= y) + P(U < y) P(V = y)
        next[y] = mix[y] * b_cdf[y] + mix_cum * b[y];
        mix_cum += mix[y];
      }
    }
    double total = 0.0;
    for (double v : next) total += v;
    step_deficit += std::max(0.0, 1.0 - total);
    require(total > 0.0, ErrorCode::runtime,
            "stationary pmf oracle lost all mass; increase state_cap");
    double tv = 0.0;
    for (std::size_t y = 0; y < cap; ++y) {
      double renorm = next[y] / total;
      tv += std::fabs(renorm - pi[y]);
      pi[y] = renorm;
    }
    tv *= 0.5;
    if (tv <= 1e-12 && iter > 0) break;
  }

  StationaryOracle out;
  out.mass_deficit = step_deficit;
  out.power_iterations = iter + 1;
  require(out.mass_deficit <= tol, ErrorCode::invalid_argument,
          "stationary pmf oracle: truncation deficit exceeds tolerance; "
          "increase state_cap");
  out.pmf.resize(cap);
  for (std::size_t y = 0; y < cap; ++y)
    out.pmf[y] = pi[y] * (1.0 - out.mass_deficit);
  return out;
}

}  // namespace branchtail
