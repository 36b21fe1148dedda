#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "lentparticle/error.hpp"
#include "lentparticle/prm.hpp"
#include "lentparticle/stats.hpp"

namespace {

lp::StreamKey origin(std::uint64_t seed, std::uint64_t path) { return {seed, path, 0, lp::StreamTag::Skeleton, 0}; }

const lp::LevyMeasureSpec kMass18 = lp::LevyMeasureSpec::power_law(0.5, 1.0, 0.01);

TEST(SamplePath, CountIsPoisson18) {
  std::vector<double> n(10000), n2(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i] = static_cast<double>(lp::sample_path(kMass18, 1.0, origin(1, i)).size());
    n2[i] = (n[i] - 18.0) * (n[i] - 18.0);
  }
  const auto m = lp::mean_se(n);
  EXPECT_NEAR(m.value, 18.0, 3.0 * m.se);
  const auto v = lp::mean_se(n2);
  EXPECT_NEAR(v.value, 18.0, 3.0 * v.se);
}

TEST(SamplePath, ZeroMassIsEmpty) {
  const auto p = lp::sample_path(lp::LevyMeasureSpec::power_law(0.5, 1.0, 2.0), 1.0, origin(1, 0));
  EXPECT_EQ(p.size(), 0u);
  EXPECT_EQ(lp::sample_path(kMass18, 0.0, origin(1, 0)).size(), 0u);
}

TEST(SamplePath, FirstArrivalIsExponential) {
  std::vector<double> first;
  for (std::size_t i = 0; i < 10000; ++i) {
    const auto p = lp::sample_path(kMass18, 1.0, origin(2, i));
    if (p.size() > 0) first.push_back(p.jumps.front().time);
  }
  EXPECT_GT(lp::ks_one_sample(first, [](double t) { return 1.0 - std::exp(-18.0 * t); }).p_value, 0.01);
}

TEST(SamplePath, TimesSortedInsideHorizon) {
  const auto p = lp::sample_path(kMass18, 2.5, origin(3, 0));
  ASSERT_GT(p.size(), 0u);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_GT(p.jumps[i].time, 0.0);
    EXPECT_LT(p.jumps[i].time, 2.5);
    if (i) {
      EXPECT_LE(p.jumps[i - 1].time, p.jumps[i].time);
    }
  }
}

TEST(SamplePath, MarksOnlyMatchFullPath) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto p = lp::sample_path(kMass18, 1.0, origin(4, i));
    const auto m = lp::sample_marks(kMass18, 1.0, origin(4, i));
    ASSERT_EQ(m.size(), p.size());
    for (std::size_t k = 0; k < m.size(); ++k) EXPECT_EQ(m[k], p.jumps[k].mark);
  }
}

TEST(SamplePath, Superposition) {
  const auto a = lp::LevyMeasureSpec::uniform(0.0, 1.0, 1.5), b = lp::LevyMeasureSpec::uniform(0.0, 1.0, 2.5);
  std::vector<int> counts(20, 0);
  for (std::size_t i = 0; i < 5000; ++i) {
    const auto p = lp::superpose(lp::sample_path(a, 1.0, origin(5, i)), lp::sample_path(b, 1.0, origin(6, i)));
    for (std::size_t k = 1; k < p.size(); ++k) ASSERT_LE(p.jumps[k - 1].time, p.jumps[k].time);
    ++counts[std::min<std::size_t>(p.size(), 19)];
  }
  const boost::math::poisson_distribution<double> pois(4.0);
  const auto r = lp::chi_square_counts(counts, [&](int k) { return boost::math::pdf(pois, k); });
  EXPECT_GT(r.p_value, 0.01);
}

TEST(RhoMarks, Deterministic) {
  const auto p = lp::sample_path(kMass18, 1.0, origin(7, 0));
  const auto a = lp::attach_rho_marks(p, 2, lp::RhoBasis::Gaussian, 3, 5);
  const auto b = lp::attach_rho_marks(p, 2, lp::RhoBasis::Gaussian, 3, 5);
  EXPECT_EQ(a.rho, b.rho);
  const auto c = lp::attach_rho_marks(p, 2, lp::RhoBasis::Gaussian, 3, 6);
  EXPECT_NE(a.rho, c.rho);
  EXPECT_EQ(a.jumps.size(), p.jumps.size());
}

TEST(RhoMarks, BlocksUncorrelatedAndGaussian) {
  std::vector<double> g1, prod;
  for (std::size_t i = 0; g1.size() < 10000; ++i) {
    const auto p = lp::attach_rho_marks(lp::sample_path(kMass18, 1.0, origin(8, i)), 2, lp::RhoBasis::Gaussian);
    for (std::size_t j = 0; j < p.size(); ++j) {
      g1.push_back(p.rho_mark(j, 0));
      prod.push_back(p.rho_mark(j, 0) * p.rho_mark(j, 1));
    }
  }
  const auto c = lp::mean_se(prod);
  EXPECT_NEAR(c.value, 0.0, 3.0 * c.se);
  EXPECT_GT(lp::ks_one_sample(g1, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }).p_value, 0.01);
}

TEST(RhoMarks, RademacherValues) {
  const auto p = lp::attach_rho_marks(lp::sample_path(kMass18, 1.0, origin(9, 0)), 1, lp::RhoBasis::Rademacher);
  for (std::size_t j = 0; j < p.size(); ++j) EXPECT_EQ(std::abs(p.rho_mark(j, 0)), 1.0);
  EXPECT_THROW(p.rho_mark(0, 1), lp::Error);
}

TEST(RhoMarks, OrderMustBePositive) {
  EXPECT_THROW(lp::attach_rho_marks(lp::sample_path(kMass18, 1.0, origin(9, 0)), 0, lp::RhoBasis::Gaussian), lp::Error);
}

TEST(NestedBrownian, TerminalVariance) {
  const double y = 0.37;
  std::vector<double> w2(10000);
  for (std::size_t i = 0; i < w2.size(); ++i) {
    lp::RngStream s({10, i, 0, lp::StreamTag::NestedBrownian, 0});
    const double w = lp::nested_brownian(y, 0.05, 1, s).terminal();
    w2[i] = w * w;
  }
  const auto e = lp::mean_se(w2);
  EXPECT_NEAR(e.value, y, 3.0 * e.se);
}

TEST(NestedBrownian, ZeroDurationIsEmpty) {
  lp::RngStream s({10, 0, 0, lp::StreamTag::NestedBrownian, 0});
  const auto b = lp::nested_brownian(0.0, 0.1, 2, s);
  EXPECT_EQ(b.steps(), 0u);
  EXPECT_EQ(b.terminal(1), 0.0);
}

TEST(NestedBrownian, StepsAndTelescoping) {
  lp::RngStream s({10, 1, 0, lp::StreamTag::NestedBrownian, 0});
  const auto b = lp::nested_brownian(0.25, 0.1, 2, s);
  ASSERT_EQ(b.steps(), 3u);
  EXPECT_DOUBLE_EQ(b.dt[0], 0.1);
  EXPECT_NEAR(b.dt[2], 0.05, 1e-15);
  for (int k = 0; k < 2; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < b.steps(); ++i) sum += b.dw[i * 2 + static_cast<std::size_t>(k)];
    EXPECT_EQ(sum, b.terminal(k));
  }
}

TEST(NestedBrownian, ReproducibleFromJumpSubstream) {
  const auto p = lp::sample_path(kMass18, 1.0, origin(11, 0));
  const auto a = lp::nested_brownian(p, 2, 0.3, 0.01, 1), b = lp::nested_brownian(p, 2, 0.3, 0.01, 1);
  EXPECT_EQ(a.dw, b.dw);
  EXPECT_NE(a.dw, lp::nested_brownian(p, 3, 0.3, 0.01, 1).dw);
}

TEST(PathCsv, OneRowPerJump) {
  const auto p = lp::sample_path(kMass18, 1.0, origin(12, 0));
  std::ostringstream os;
  lp::write_path_csv(os, p);
  const std::string s = os.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), p.size() + 1);
}

}  // namespace
