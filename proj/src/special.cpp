#include "branchtail/special.hpp"

#include <cmath>
#include <cstdlib>

#include "branchtail/error.hpp"

namespace branchtail::special {

namespace {

// Euler-Maclaurin tail of sum_{n >= N} n^{-s}:
//   N^{1-s}/(s-1) + N^{-s}/2 + s N^{-s-1}/12
//   - s(s+1)(s+2) N^{-s-3}/720 + s...(s+4) N^{-s-5}/30240.
double em_power_tail(double s, double n) {
  double ns = std::pow(n, -s);
  double inv = 1.0 / n;
  double t = ns * n / (s - 1.0) + 0.5 * ns;
  t += s * ns * inv / 12.0;
  t -= s * (s + 1) * (s + 2) * ns * inv * inv * inv / 720.0;
  t += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * ns * std::pow(inv, 5) / 30240.0;
  return t;
}

}  // namespace

double power_tail_sum(double s, std::uint64_t n0) {
  require(s > 1.0 && n0 >= 1, ErrorCode::invalid_argument,
          "power_tail_sum needs s > 1, n0 >= 1");
  std::uint64_t cut = n0 + 64;
  double head = 0;
  for (std::uint64_t n = n0; n < cut; ++n)
    head += std::pow(static_cast<double>(n), -s);
  return head + em_power_tail(s, static_cast<double>(cut));
}

double zeta(double s) {
  require(s > 1.0, ErrorCode::invalid_argument, "zeta defined here for s > 1 only");
  return power_tail_sum(s, 1);
}

double upper_gamma(double a, double z) {
  require(z > 0, ErrorCode::invalid_argument, "upper_gamma needs z > 0");
  if (z >= 1.5) {
    // Modified Lentz continued fraction; solid for z >= ~1 and any real a.
    const double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n <= 400; ++n) {
      double an = -static_cast<double>(n) * (static_cast<double>(n) - a);
      b += 2.0;
      d = an * d + b;
      if (std::fabs(d) < tiny) d = tiny;
      c = b + an / c;
      if (std::fabs(c) < tiny) c = tiny;
      d = 1.0 / d;
      double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-z + a * std::log(z)) * h;
  }
  // Small z: lower-incomplete series at a lifted above 0, then recurse down
  // via Gamma(a, z) = (Gamma(a+1, z) - z^a e^{-z}) / a.
  int lift = a > 0 ? 0 : static_cast<int>(std::floor(-a)) + 1;
  double ah = a + lift;
  double term = 1.0 / ah;
  double sum = term;
  for (int n = 1; n <= 600; ++n) {
    term *= z / (ah + n);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  double lower = sum * std::exp(-z + ah * std::log(z));
  double g = std::tgamma(ah) - lower;
  for (int j = 1; j <= lift; ++j) {
    double aj = ah - j;
    g = (g - std::exp(-z + aj * std::log(z))) / aj;
  }
  return g;
}

double pareto_pgf(double s, double alpha, double c0) {
  require(alpha > 0 && c0 > 0 && c0 <= 1.0, ErrorCode::invalid_argument,
          "pareto_pgf needs alpha > 0, c0 in (0,1]");
  require(s >= 0 && s <= 1.0, ErrorCode::invalid_argument,
          "pgf argument outside [0,1]");
  if (s == 0.0) return 1.0 - c0;
  if (s == 1.0) return 1.0;
  if (alpha == 1.0)  // sum s^n/(1+n) = -log(1-s)/s in closed form
    return 1.0 - (1.0 - s) * c0 * (-std::log1p(-s) / s);

  const double eps = 1e-13;
  double t = -std::log(s);
  // Terms needed for the direct certified stop c0 s^{n+1} (n+2)^{-a} <= eps.
  double direct_n = std::log(std::fmax(c0, 1e-2) / eps) / t;
  bool near_integer = std::fabs(alpha - std::round(alpha)) < 0.05;

  if (near_integer || direct_n <= 2.0e5) {
    double phi = 0, pw = 1.0;  // pw = s^n
    for (std::uint64_t n = 0;; ++n) {
      phi += pw * std::pow(1.0 + static_cast<double>(n), -alpha);
      pw *= s;
      if (c0 * pw * std::pow(static_cast<double>(n) + 2.0, -alpha) <= eps) break;
      if (n > 80000000ULL)
        fail(ErrorCode::runtime, "pareto_pgf series failed to converge");
    }
    return 1.0 - (1.0 - s) * c0 * phi;
  }

  // Euler-Maclaurin: direct head to M, then
  //   sum_{n>=M} e^{-tn}(1+n)^{-a}
  //     = e^t t^{a-1} Gamma(1-a, t(M+1)) + f(M)/2 - f'(M)/12 + f'''(M)/720 + ...
  const std::uint64_t M = 16384;
  double phi = 0, pw = 1.0;
  for (std::uint64_t n = 0; n < M; ++n) {
    phi += pw * std::pow(1.0 + static_cast<double>(n), -alpha);
    pw *= s;
  }
  double integral = std::exp(t + (alpha - 1.0) * std::log(t)) *
                    upper_gamma(1.0 - alpha, t * (static_cast<double>(M) + 1.0));
  double fm = std::exp(-t * static_cast<double>(M)) *
              std::pow(1.0 + static_cast<double>(M), -alpha);
  double gp = -t - alpha / (1.0 + static_cast<double>(M));   // (log f)'
  double gpp = alpha / std::pow(1.0 + static_cast<double>(M), 2.0);
  double gppp = -2.0 * alpha / std::pow(1.0 + static_cast<double>(M), 3.0);
  double f1 = fm * gp;
  double f3 = fm * (gp * gp * gp + 3.0 * gp * gpp + gppp);
  phi += integral + 0.5 * fm - f1 / 12.0 + f3 / 720.0;
  return 1.0 - (1.0 - s) * c0 * phi;
}

}  // namespace branchtail::special
