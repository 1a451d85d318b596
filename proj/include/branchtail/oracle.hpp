#pragma once

#include <vector>

#include "branchtail/process.hpp"

namespace branchtail {

// k-fold composition f(f(...f(s))) of the offspring pgf; the pgf of the
// iterated thinning of one individual.  k = 0 is the identity.
double iterate_pgf(const DistributionSpec& offspring, int k, double s);

// Stationary pgf of the sum recursion as the truncated product
//   prod_{k=0..depth} g(f^(k)(s)),
// where g is the immigration pgf.  The dropped log-remainder is bounded by
// sum_{k>depth} (1 - g(f^(k)(s))) <= E(B) mu^{depth+1} (1-s)/(1-mu).
double stationary_pgf(const ModelConfig& cfg, double s, int depth);

struct MomentWithBound {
  double exact;
  double bound;
};

// Exact second moment m2(k) = E (thin^k(1))^2 via the variance recursion
//   Var_k = mu Var_{k-1} + Var(A) mu^{2(k-1)},
// paired with the envelope E(A^2) (k+1) mu^k.  The envelope is the classical
// reference value, not a certified bound: it dips below the exact moment when
// mu (k+1) < 1 (e.g. Bernoulli(0.3) at k = 2), so it is returned for
// inspection rather than asserted.
MomentWithBound exact_m2(const DistributionSpec& offspring, int k);

// Exact third moment of thin^k(1) via the compound-sum recursion using the
// falling factorial moments of A, paired with the envelope
//   mu^k E(A^3) + E(A^3) k mu^{2k} + 3 E(A^2)^2 k^2 mu^k.
// Requires mu < 1 and E(A^3) < inf.
MomentWithBound exact_m3(const DistributionSpec& offspring, int k);

struct StationaryMoments {
  double mean;      // E(B) / (1 - mu)
  double variance;  // (Var(A) mean + Var(B)) / (1 - mu^2)
};

// Closed-form stationary mean/variance of the sum recursion (total-variance
// decomposition of thin(X) + B); entries are +inf when the inputs diverge.
StationaryMoments stationary_moments(const ModelConfig& cfg);

struct StationaryOracle {
  std::vector<double> pmf;   // states 0..state_cap-1, sums to 1 - mass_deficit
  double mass_deficit = 0;
  int power_iterations = 0;
};

// Exact finite-state-truncation oracle: builds the transition kernel
// P(x -> .) = law of thin(x) + B by convolution on {0..state_cap}, power
// iterates to the fixed point (TV stop 1e-12), and reports the stationary
// mass escaping the cap.  Errors when mass_deficit > tol.
StationaryOracle stationary_pmf_bruteforce(const ModelConfig& cfg,
                                           int state_cap, double tol);

}  // namespace branchtail
