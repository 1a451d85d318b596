#include "branchtail/stats.hpp"

#include <algorithm>
#include <cmath>

#include "branchtail/error.hpp"

namespace branchtail {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  require(!sample.empty(), ErrorCode::invalid_argument,
          "ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(f - i / n));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::invalid_argument,
          "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

double empirical_quantile(std::span<const std::uint64_t> values, double q) {
  require(!values.empty(), ErrorCode::invalid_argument,
          "empirical_quantile: empty sample");
  require(q > 0.0 && q <= 1.0, ErrorCode::invalid_argument,
          "empirical_quantile: q must lie in (0,1]");
  std::vector<std::uint64_t> v(values.begin(), values.end());
  std::size_t k = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(v.size())));
  k = std::min(std::max<std::size_t>(k, 1), v.size());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return static_cast<double>(v[k - 1]);
}

double empirical_quantile_real(std::span<const double> values, double q) {
  require(!values.empty(), ErrorCode::invalid_argument,
          "empirical_quantile: empty sample");
  require(q > 0.0 && q <= 1.0, ErrorCode::invalid_argument,
          "empirical_quantile: q must lie in (0,1]");
  std::vector<double> v(values.begin(), values.end());
  std::size_t k = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(v.size())));
  k = std::min(std::max<std::size_t>(k, 1), v.size());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return v[k - 1];
}

double mean_of(std::span<const double> v) {
  require(!v.empty(), ErrorCode::invalid_argument, "mean_of: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
  require(!v.empty(), ErrorCode::invalid_argument, "variance_of: empty sample");
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  require(!v.empty(), ErrorCode::invalid_argument, "median_of: empty sample");
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + (mid - 1), v.end());
  return 0.5 * (v[mid - 1] + hi);
}

std::map<std::uint64_t, double> empirical_pmf(std::span<const std::uint64_t> v) {
  require(!v.empty(), ErrorCode::invalid_argument, "empirical_pmf: empty sample");
  std::map<std::uint64_t, double> pmf;
  double w = 1.0 / static_cast<double>(v.size());
  for (std::uint64_t x : v) pmf[x] += w;
  return pmf;
}

double tv_distance(const std::map<std::uint64_t, double>& a,
                   const std::map<std::uint64_t, double>& b) {
  double d = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      d += std::fabs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      d += std::fabs(ib->second);
      ++ib;
    } else {
      d += std::fabs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * d;
}

double chi_square_statistic(std::span<const std::int64_t> observed,
                            std::span<const double> probability) {
  require(observed.size() == probability.size() && !observed.empty(),
          ErrorCode::invalid_argument,
          "chi_square_statistic: category count mismatch");
  std::int64_t total = 0;
  for (std::int64_t c : observed) {
    require(c >= 0, ErrorCode::invalid_argument,
            "chi_square_statistic: negative count");
    total += c;
  }
  require(total > 0, ErrorCode::invalid_argument,
          "chi_square_statistic: no observations");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    require(probability[i] > 0.0, ErrorCode::invalid_argument,
            "chi_square_statistic: zero-probability category");
    double expected = probability[i] * static_cast<double>(total);
    double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace branchtail
