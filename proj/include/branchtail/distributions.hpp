#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "branchtail/error.hpp"
#include "branchtail/rng.hpp"

namespace branchtail {

enum class Family {
  dirac,
  bernoulli,
  binomial,
  poisson,
  geometric,
  discrete_pareto,
  zero_inflated_pareto,
};

struct Moments {
  double mean;            // +inf when the mean diverges
  double second_moment;   // +inf when E X^2 diverges
  bool log_moment_finite; // E log(1+X) < inf
};

// One nonnegative-integer-valued distribution.  Families:
//   dirac(value)                   point mass
//   bernoulli(p)                   {0,1}
//   binomial(m, p)
//   poisson(lambda)
//   geometric(p)                   P(X=k) = p (1-p)^k on {0,1,...}
//   discrete_pareto(alpha, scale)  P(X>n) = scale (1+n)^{-alpha}
//   zero_inflated_pareto(q, alpha, scale)
//                                  mixture: 0 w.p. 1-q, discrete_pareto w.p. q
class DistributionSpec {
 public:
  static DistributionSpec dirac(std::uint64_t value);
  static DistributionSpec bernoulli(double p);
  static DistributionSpec binomial(std::uint64_t m, double p);
  static DistributionSpec poisson(double lambda);
  static DistributionSpec geometric(double p);
  static DistributionSpec discrete_pareto(double alpha, double scale = 1.0);
  static DistributionSpec zero_inflated_pareto(double q, double alpha,
                                               double scale = 1.0);

  Family family() const { return family_; }
  double p() const { return p_; }
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  double q() const { return q_; }
  std::uint64_t value() const { return value_; }
  std::uint64_t m() const { return m_; }

  std::uint64_t sample(RandomStream& rng) const;

  double tail(std::uint64_t x) const;  // P(X > x)
  double tail_real(double x) const;    // P(X > x) for a real threshold
  double pmf(std::uint64_t n) const;
  double pgf(double s) const;          // E s^X, s in [0,1]
  Moments moments() const;

  double mean() const { return moments().mean; }
  double second_moment() const { return moments().second_moment; }
  double variance() const;
  // E X^3 (+inf when divergent) and the falling factorial moments
  // E X(X-1), E X(X-1)(X-2); used by the compound moment recursions.
  double third_moment() const;
  double factorial2() const;
  double factorial3() const;

  // True for heavy-tailed families with a genuine power tail (used to pick
  // tail-theory constants); dirac/bernoulli/... are light.
  bool heavy_tailed() const;
  // Power-tail scale c with P(X>n) ~ c n^{-alpha}: scale for discrete_pareto,
  // q*scale for zero_inflated_pareto, 0 otherwise.
  double tail_scale() const;

  nlohmann::json to_json() const;
  static DistributionSpec from_json(const nlohmann::json& j);

  std::string describe() const;

  bool operator==(const DistributionSpec&) const = default;

 private:
  DistributionSpec() = default;

  Family family_ = Family::dirac;
  double p_ = 0, lambda_ = 0, alpha_ = 0, scale_ = 0, q_ = 0;
  std::uint64_t value_ = 0, m_ = 0;
};

// Parameterised draws shared with the thinning shortcuts.  Small cases use an
// explicit Bernoulli/product loop (cheaper than constructing a std::
// distribution), large cases defer to the library samplers; the crossover is
// fixed so sequences are reproducible.
std::uint64_t binomial_draw(std::uint64_t n, double p, RandomStream& rng);
std::uint64_t poisson_draw(double lambda, RandomStream& rng);
std::uint64_t negative_binomial_draw(std::uint64_t k, double p, RandomStream& rng);

}  // namespace branchtail
