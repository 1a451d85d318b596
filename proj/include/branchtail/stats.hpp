#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace branchtail {

double normal_cdf(double x);  // standard normal

// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Order-statistic quantile: the ceil(q*n)-th smallest value.
double empirical_quantile(std::span<const std::uint64_t> values, double q);
double empirical_quantile_real(std::span<const double> values, double q);

double mean_of(std::span<const double> v);
double variance_of(std::span<const double> v);  // denominator n
double median_of(std::vector<double> v);

std::map<std::uint64_t, double> empirical_pmf(std::span<const std::uint64_t> v);
double tv_distance(const std::map<std::uint64_t, double>& a,
                   const std::map<std::uint64_t, double>& b);

// Pearson chi-square statistic for observed counts vs a probability vector
// over the same categories (expected = prob * total).
double chi_square_statistic(std::span<const std::int64_t> observed,
                            std::span<const double> probability);

}  // namespace branchtail
