#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "lentparticle/quadrature.hpp"
#include "lentparticle/rng.hpp"
#include "lentparticle/stats.hpp"

namespace {

TEST(Stats, MeanAndSe) {
  const std::vector<double> x = {1, 2, 3, 4};
  const auto e = lp::mean_se(x);
  EXPECT_DOUBLE_EQ(e.value, 2.5);
  EXPECT_NEAR(e.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.n, 4u);
}

TEST(Stats, PairedDifference) {
  const std::vector<double> x = {1, 2, 3}, y = {0.5, 1.5, 2.5};
  const auto d = lp::paired_difference(x, y);
  EXPECT_DOUBLE_EQ(d.value, 0.5);
  EXPECT_DOUBLE_EQ(d.se, 0.0);
}

// scipy.stats.kstwobign.sf
TEST(Stats, KolmogorovTail) {
  EXPECT_NEAR(lp::kolmogorov_tail(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(lp::kolmogorov_tail(0.5), 0.9639452436648751, 1e-12);
  EXPECT_NEAR(lp::kolmogorov_tail(1.36), 0.049485876755377876, 1e-12);
  EXPECT_DOUBLE_EQ(lp::kolmogorov_tail(0.0), 1.0);
}

TEST(Stats, TwoSampleKsSeparatesShiftedLaws) {
  lp::RngStream s({1, 0, 0, lp::StreamTag::Generic, 0});
  std::vector<double> a(2000), b(2000), c(2000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = s.gaussian();
    b[i] = s.gaussian();
    c[i] = s.gaussian() + 0.3;
  }
  EXPECT_GT(lp::ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(lp::ks_two_sample(a, c).p_value, 1e-6);
  EXPECT_DOUBLE_EQ(lp::ks_two_sample(a, a).statistic, 0.0);
}

TEST(Stats, ChiSquareAcceptsPoissonCounts) {
  lp::RngStream s({2, 0, 0, lp::StreamTag::Generic, 0});
  const boost::math::poisson_distribution<double> pois(4.0);
  std::vector<int> counts;
  for (int i = 0; i < 5000; ++i) {
    const double u = s.uniform();
    int k = 0;
    while (boost::math::cdf(pois, k) < u) ++k;
    counts.push_back(k);
  }
  const auto r = lp::chi_square_counts(counts, [&](int k) { return boost::math::pdf(pois, k); });
  EXPECT_GT(r.p_value, 0.01);
  EXPECT_GT(r.dof, 3);
}

TEST(Stats, QuantileSorted) {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(lp::quantile_sorted(x, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(lp::quantile_sorted(x, 0.125), 0.5);
  EXPECT_DOUBLE_EQ(lp::quantile_sorted(x, 1.0), 4.0);
}

TEST(Stats, LinearFitIsExactOnLines) {
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  const auto f = lp::linear_fit(x, y);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  EXPECT_NEAR(f.rss, 0.0, 1e-20);
}

TEST(Quadrature, SingularLowerEndpoint) {
  const auto r = lp::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, SmoothInterval) {
  // scipy.integrate.quad of exp(-y) - 1 on [0, 1]
  const auto r = lp::integrate([](double y) { return std::exp(-y) - 1.0; }, 0.0, 1.0);
  EXPECT_NEAR(r.value, -0.36787944117144233, 1e-12);
}

TEST(Quadrature, SemiInfinite) {
  const auto r = lp::integrate([](double x) { return std::exp(-x * x); }, 0.0, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(r.value, 0.5 * std::sqrt(M_PI), 1e-10);
}

}  // namespace
