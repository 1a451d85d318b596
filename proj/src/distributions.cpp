#include "branchtail/distributions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "branchtail/special.hpp"

namespace branchtail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (1+n)^{-alpha} tail sum helpers for the Pareto family.
// E X   = c0 * zeta(alpha)                (alpha > 1)
// E X^2 = c0 * (2 zeta(alpha-1) - zeta(alpha))     (alpha > 2)
// E X^3 = c0 * (3 zeta(alpha-2) - 3 zeta(alpha-1) + zeta(alpha))  (alpha > 3)
double pareto_mean(double alpha, double c0) {
  return alpha > 1.0 ? c0 * special::zeta(alpha) : kInf;
}
double pareto_m2(double alpha, double c0) {
  if (alpha <= 2.0) return kInf;
  return c0 * (2.0 * special::zeta(alpha - 1.0) - special::zeta(alpha));
}
double pareto_m3(double alpha, double c0) {
  if (alpha <= 3.0) return kInf;
  return c0 * (3.0 * special::zeta(alpha - 2.0) - 3.0 * special::zeta(alpha - 1.0) +
               special::zeta(alpha));
}

std::uint64_t pareto_sample(double alpha, double c0, RandomStream& rng) {
  double u = rng.next_unit_open();
  double t = std::pow(c0 / u, 1.0 / alpha);
  if (t <= 1.0) return 0;
  if (t >= 4.0e18) t = 4.0e18;  // keep the cast defined; P ~ c0 t^-alpha ~ 0
  return static_cast<std::uint64_t>(std::ceil(t)) - 1;
}

}  // namespace

std::uint64_t binomial_draw(std::uint64_t n, double p, RandomStream& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n <= 128) {
    std::uint64_t s = 0;
    for (std::uint64_t i = 0; i < n; ++i)
      if (rng.next_unit_open() <= p) ++s;
    return s;
  }
  return std::binomial_distribution<std::uint64_t>(n, p)(rng.engine());
}

std::uint64_t poisson_draw(double lambda, RandomStream& rng) {
  if (lambda <= 0.0) return 0;
  if (lambda <= 16.0) {
    // Knuth product method.
    double limit = std::exp(-lambda);
    double prod = rng.next_unit_open();
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= rng.next_unit_open();
      ++k;
    }
    return k;
  }
  return std::poisson_distribution<std::uint64_t>(lambda)(rng.engine());
}

std::uint64_t negative_binomial_draw(std::uint64_t k, double p, RandomStream& rng) {
  if (k == 0 || p >= 1.0) return 0;
  if (k <= 64) {
    std::uint64_t s = 0;
    for (std::uint64_t i = 0; i < k; ++i)
      s += std::geometric_distribution<std::uint64_t>(p)(rng.engine());
    return s;
  }
  return std::negative_binomial_distribution<std::uint64_t>(k, p)(rng.engine());
}

DistributionSpec DistributionSpec::dirac(std::uint64_t value) {
  DistributionSpec d;
  d.family_ = Family::dirac;
  d.value_ = value;
  return d;
}

DistributionSpec DistributionSpec::bernoulli(double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument,
          "bernoulli: p must be in [0,1]");
  DistributionSpec d;
  d.family_ = Family::bernoulli;
  d.p_ = p;
  return d;
}

DistributionSpec DistributionSpec::binomial(std::uint64_t m, double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument,
          "binomial: p must be in [0,1]");
  DistributionSpec d;
  d.family_ = Family::binomial;
  d.m_ = m;
  d.p_ = p;
  return d;
}

DistributionSpec DistributionSpec::poisson(double lambda) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::invalid_argument,
          "poisson: lambda must be finite and >= 0");
  DistributionSpec d;
  d.family_ = Family::poisson;
  d.lambda_ = lambda;
  return d;
}

DistributionSpec DistributionSpec::geometric(double p) {
  require(p > 0.0 && p <= 1.0, ErrorCode::invalid_argument,
          "geometric: p must be in (0,1]");
  DistributionSpec d;
  d.family_ = Family::geometric;
  d.p_ = p;
  return d;
}

DistributionSpec DistributionSpec::discrete_pareto(double alpha, double scale) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::invalid_argument,
          "discrete_pareto: alpha must be finite and > 0");
  require(scale > 0.0 && scale <= 1.0, ErrorCode::invalid_argument,
          "discrete_pareto: scale must be in (0,1]");
  DistributionSpec d;
  d.family_ = Family::discrete_pareto;
  d.alpha_ = alpha;
  d.scale_ = scale;
  return d;
}

DistributionSpec DistributionSpec::zero_inflated_pareto(double q, double alpha,
                                                        double scale) {
  require(q >= 0.0 && q < 1.0, ErrorCode::invalid_argument,
          "zero_inflated_pareto: q must be in [0,1)");
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::invalid_argument,
          "zero_inflated_pareto: alpha must be finite and > 0");
  require(scale > 0.0 && scale <= 1.0, ErrorCode::invalid_argument,
          "zero_inflated_pareto: scale must be in (0,1]");
  DistributionSpec d;
  d.family_ = Family::zero_inflated_pareto;
  d.q_ = q;
  d.alpha_ = alpha;
  d.scale_ = scale;
  return d;
}

std::uint64_t DistributionSpec::sample(RandomStream& rng) const {
  switch (family_) {
    case Family::dirac:
      return value_;
    case Family::bernoulli:
      return rng.next_unit_open() <= p_ ? 1 : 0;
    case Family::binomial:
      return binomial_draw(m_, p_, rng);
    case Family::poisson:
      return poisson_draw(lambda_, rng);
    case Family::geometric:
      return p_ >= 1.0
                 ? 0
                 : std::geometric_distribution<std::uint64_t>(p_)(rng.engine());
    case Family::discrete_pareto:
      return pareto_sample(alpha_, scale_, rng);
    case Family::zero_inflated_pareto:
      if (rng.next_unit_open() > q_) return 0;
      return pareto_sample(alpha_, scale_, rng);
  }
  return 0;
}

double DistributionSpec::tail(std::uint64_t x) const {
  switch (family_) {
    case Family::dirac:
      return x < value_ ? 1.0 : 0.0;
    case Family::bernoulli:
      return x == 0 ? p_ : 0.0;
    case Family::binomial: {
      if (x >= m_) return 0.0;
      double t = 0;
      for (std::uint64_t n = x + 1; n <= m_; ++n) t += pmf(n);
      return t;
    }
    case Family::poisson: {
      // 1 - CDF(x) accumulated from the pmf; fine for the lambdas in use.
      double term = std::exp(-lambda_);
      double cdf = term;
      for (std::uint64_t n = 1; n <= x; ++n) {
        term *= lambda_ / static_cast<double>(n);
        cdf += term;
      }
      return std::fmax(0.0, 1.0 - cdf);
    }
    case Family::geometric:
      return std::pow(1.0 - p_, static_cast<double>(x) + 1.0);
    case Family::discrete_pareto:
      return scale_ * std::pow(1.0 + static_cast<double>(x), -alpha_);
    case Family::zero_inflated_pareto:
      return q_ * scale_ * std::pow(1.0 + static_cast<double>(x), -alpha_);
  }
  return 0;
}

double DistributionSpec::tail_real(double x) const {
  if (x < 0) return 1.0;
  return tail(static_cast<std::uint64_t>(std::floor(x)));
}

double DistributionSpec::pmf(std::uint64_t n) const {
  switch (family_) {
    case Family::dirac:
      return n == value_ ? 1.0 : 0.0;
    case Family::bernoulli:
      return n == 0 ? 1.0 - p_ : (n == 1 ? p_ : 0.0);
    case Family::binomial: {
      if (n > m_) return 0.0;
      if (p_ <= 0.0) return n == 0 ? 1.0 : 0.0;
      if (p_ >= 1.0) return n == m_ ? 1.0 : 0.0;
      double nd = static_cast<double>(n), md = static_cast<double>(m_);
      double lg = std::lgamma(md + 1) - std::lgamma(nd + 1) - std::lgamma(md - nd + 1);
      return std::exp(lg + nd * std::log(p_) + (md - nd) * std::log1p(-p_));
    }
    case Family::poisson: {
      if (lambda_ <= 0.0) return n == 0 ? 1.0 : 0.0;
      double nd = static_cast<double>(n);
      return std::exp(-lambda_ + nd * std::log(lambda_) - std::lgamma(nd + 1));
    }
    case Family::geometric:
      return p_ * std::pow(1.0 - p_, static_cast<double>(n));
    case Family::discrete_pareto: {
      if (n == 0) return 1.0 - scale_;
      double nd = static_cast<double>(n);
      return scale_ * (std::pow(nd, -alpha_) - std::pow(nd + 1.0, -alpha_));
    }
    case Family::zero_inflated_pareto: {
      double base = DistributionSpec::discrete_pareto(alpha_, scale_).pmf(n);
      return n == 0 ? (1.0 - q_) + q_ * base : q_ * base;
    }
  }
  return 0;
}

double DistributionSpec::pgf(double s) const {
  require(s >= 0.0 && s <= 1.0, ErrorCode::invalid_argument,
          "pgf argument outside [0,1]");
  switch (family_) {
    case Family::dirac:
      return std::pow(s, static_cast<double>(value_));
    case Family::bernoulli:
      return 1.0 - p_ + p_ * s;
    case Family::binomial:
      return std::pow(1.0 - p_ + p_ * s, static_cast<double>(m_));
    case Family::poisson:
      return std::exp(lambda_ * (s - 1.0));
    case Family::geometric:
      return p_ / (1.0 - (1.0 - p_) * s);
    case Family::discrete_pareto:
      return special::pareto_pgf(s, alpha_, scale_);
    case Family::zero_inflated_pareto:
      return (1.0 - q_) + q_ * special::pareto_pgf(s, alpha_, scale_);
  }
  return 0;
}

Moments DistributionSpec::moments() const {
  // Every implemented family has E log(1+X) < inf (power tails included).
  switch (family_) {
    case Family::dirac: {
      double v = static_cast<double>(value_);
      return {v, v * v, true};
    }
    case Family::bernoulli:
      return {p_, p_, true};
    case Family::binomial: {
      double md = static_cast<double>(m_);
      double mean = md * p_;
      return {mean, mean * (1.0 - p_) + mean * mean, true};
    }
    case Family::poisson:
      return {lambda_, lambda_ + lambda_ * lambda_, true};
    case Family::geometric: {
      double qq = 1.0 - p_;
      double mean = qq / p_;
      double var = qq / (p_ * p_);
      return {mean, var + mean * mean, true};
    }
    case Family::discrete_pareto:
      return {pareto_mean(alpha_, scale_), pareto_m2(alpha_, scale_), true};
    case Family::zero_inflated_pareto:
      return {q_ == 0 ? 0.0 : q_ * pareto_mean(alpha_, scale_),
              q_ == 0 ? 0.0 : q_ * pareto_m2(alpha_, scale_), true};
  }
  return {0, 0, true};
}

double DistributionSpec::variance() const {
  Moments mo = moments();
  if (!std::isfinite(mo.second_moment)) return kInf;
  return mo.second_moment - mo.mean * mo.mean;
}

double DistributionSpec::third_moment() const {
  switch (family_) {
    case Family::dirac: {
      double v = static_cast<double>(value_);
      return v * v * v;
    }
    case Family::bernoulli:
      return p_;
    case Family::binomial: {
      double md = static_cast<double>(m_);
      double f1 = md * p_;
      double f2 = md * (md - 1) * p_ * p_;
      double f3 = md * (md - 1) * (md - 2) * p_ * p_ * p_;
      return f3 + 3.0 * f2 + f1;  // x^3 = x(x-1)(x-2) + 3x(x-1) + x
    }
    case Family::poisson:
      return lambda_ * lambda_ * lambda_ + 3.0 * lambda_ * lambda_ + lambda_;
    case Family::geometric: {
      double qq = 1.0 - p_;
      double f1 = qq / p_;
      double f2 = 2.0 * qq * qq / (p_ * p_);
      double f3 = 6.0 * qq * qq * qq / (p_ * p_ * p_);
      return f3 + 3.0 * f2 + f1;
    }
    case Family::discrete_pareto:
      return pareto_m3(alpha_, scale_);
    case Family::zero_inflated_pareto:
      return q_ == 0 ? 0.0 : q_ * pareto_m3(alpha_, scale_);
  }
  return 0;
}

double DistributionSpec::factorial2() const {
  double m2 = second_moment();
  if (!std::isfinite(m2)) return kInf;
  return m2 - mean();
}

double DistributionSpec::factorial3() const {
  double m3 = third_moment();
  if (!std::isfinite(m3)) return kInf;
  return m3 - 3.0 * second_moment() + 2.0 * mean();
}

bool DistributionSpec::heavy_tailed() const {
  return family_ == Family::discrete_pareto ||
         (family_ == Family::zero_inflated_pareto && q_ > 0);
}

double DistributionSpec::tail_scale() const {
  if (family_ == Family::discrete_pareto) return scale_;
  if (family_ == Family::zero_inflated_pareto) return q_ * scale_;
  return 0.0;
}

nlohmann::json DistributionSpec::to_json() const {
  nlohmann::json j;
  switch (family_) {
    case Family::dirac:
      j["family"] = "dirac";
      j["value"] = value_;
      break;
    case Family::bernoulli:
      j["family"] = "bernoulli";
      j["p"] = p_;
      break;
    case Family::binomial:
      j["family"] = "binomial";
      j["m"] = m_;
      j["p"] = p_;
      break;
    case Family::poisson:
      j["family"] = "poisson";
      j["lambda"] = lambda_;
      break;
    case Family::geometric:
      j["family"] = "geometric";
      j["p"] = p_;
      break;
    case Family::discrete_pareto:
      j["family"] = "discrete_pareto";
      j["alpha"] = alpha_;
      j["scale"] = scale_;
      break;
    case Family::zero_inflated_pareto:
      j["family"] = "zero_inflated_pareto";
      j["q"] = q_;
      j["alpha"] = alpha_;
      j["scale"] = scale_;
      break;
  }
  return j;
}

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  for (const char* k : required)
    require(j.contains(k), ErrorCode::invalid_argument,
            std::string("distribution: missing field \"") + k + "\"");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : required)
      if (it.key() == k) known = true;
    for (const char* k : optional)
      if (it.key() == k) known = true;
    require(known, ErrorCode::invalid_argument,
            "distribution: unknown field \"" + it.key() + "\"");
  }
}

double num_field(const nlohmann::json& j, const char* k) {
  require(j.at(k).is_number(), ErrorCode::invalid_argument,
          std::string("distribution: field \"") + k + "\" must be a number");
  return j.at(k).get<double>();
}

std::uint64_t uint_field(const nlohmann::json& j, const char* k) {
  require(j.at(k).is_number_unsigned() || (j.at(k).is_number_integer() &&
                                           j.at(k).get<std::int64_t>() >= 0),
          ErrorCode::invalid_argument,
          std::string("distribution: field \"") + k +
              "\" must be a nonnegative integer");
  return j.at(k).get<std::uint64_t>();
}

}  // namespace

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::invalid_argument,
          "distribution must be a JSON object");
  require(j.contains("family") && j.at("family").is_string(),
          ErrorCode::invalid_argument,
          "distribution: missing string field \"family\"");
  std::string fam = j.at("family").get<std::string>();
  if (fam == "dirac") {
    check_keys(j, {"family", "value"}, {});
    return dirac(uint_field(j, "value"));
  }
  if (fam == "bernoulli") {
    check_keys(j, {"family", "p"}, {});
    return bernoulli(num_field(j, "p"));
  }
  if (fam == "binomial") {
    check_keys(j, {"family", "m", "p"}, {});
    return binomial(uint_field(j, "m"), num_field(j, "p"));
  }
  if (fam == "poisson") {
    check_keys(j, {"family", "lambda"}, {});
    return poisson(num_field(j, "lambda"));
  }
  if (fam == "geometric") {
    check_keys(j, {"family", "p"}, {});
    return geometric(num_field(j, "p"));
  }
  if (fam == "discrete_pareto") {
    check_keys(j, {"family", "alpha"}, {"scale"});
    return discrete_pareto(num_field(j, "alpha"),
                           j.contains("scale") ? num_field(j, "scale") : 1.0);
  }
  if (fam == "zero_inflated_pareto") {
    check_keys(j, {"family", "q", "alpha"}, {"scale"});
    return zero_inflated_pareto(num_field(j, "q"), num_field(j, "alpha"),
                                j.contains("scale") ? num_field(j, "scale") : 1.0);
  }
  fail(ErrorCode::invalid_argument, "distribution: unknown family \"" + fam + "\"");
}

std::string DistributionSpec::describe() const {
  return to_json().dump();
}

}  // namespace branchtail
