#pragma once
/// Small statistics toolkit: sample moments, Kolmogorov-Smirnov tests,
/// chi-square goodness of fit and quantiles. Reductions run in index order
/// so results are reproducible bit for bit.

#include <functional>
#include <span>
#include <vector>

namespace lp {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

Estimate mean_se(std::span<const double> x);
/// Mean and SE of the paired difference x - y.
Estimate paired_difference(std::span<const double> x, std::span<const double> y);
double variance(std::span<const double> x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t n = 0;
};

/// Asymptotic Kolmogorov distribution tail P(K > x).
double kolmogorov_tail(double x);
KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Pearson test of integer counts against probabilities of cells 0..k-2 and a
/// tail cell; cells with expected count < 5 are merged into their neighbours.
ChiSquareResult chi_square_counts(std::span<const int> counts, const std::function<double(int)>& pmf);

/// Linear-interpolated quantile of an already sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  double rss = 0.0;
};

/// Weighted least squares y = a + b x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});

}  // namespace lp
