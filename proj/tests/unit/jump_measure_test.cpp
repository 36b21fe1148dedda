#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "lentparticle/error.hpp"
#include "lentparticle/jump_measure.hpp"
#include "lentparticle/stats.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

lp::LevyMeasureSpec stable_half(double truncation = 0.01) { return lp::LevyMeasureSpec::power_law(0.5, 1.0, truncation); }

TEST(TotalMass, PowerLawClosedForm) { EXPECT_NEAR(lp::total_mass(stable_half()), 18.0, 1e-12); }

TEST(TotalMass, Uniform) { EXPECT_DOUBLE_EQ(lp::total_mass(lp::LevyMeasureSpec::uniform(0.0, 2.0)), 2.0); }

TEST(TotalMass, TruncationAboveSupportIsEmpty) {
  EXPECT_DOUBLE_EQ(lp::total_mass(lp::LevyMeasureSpec::power_law(0.5, 1.0, 2.0)), 0.0);
}

TEST(TotalMass, TabulatedTrapezoid) {
  const auto m = lp::LevyMeasureSpec::tabulated({0.0, 1.0, 2.0}, {1.0, 3.0, 1.0});
  EXPECT_NEAR(lp::total_mass(m), 4.0, 1e-12);
}

TEST(TotalMass, InfiniteActivityWithoutTruncationFails) {
  EXPECT_THROW(lp::total_mass(stable_half(0.0)), lp::Error);
}

TEST(SampleMark, PowerLawMean) {
  const auto m = stable_half();
  std::vector<double> y(100000);
  for (std::size_t i = 0; i < y.size(); ++i) {
    lp::RngStream s({3, i, 0, lp::StreamTag::Mark, 0});
    y[i] = lp::sample_mark(m, s);
  }
  const auto e = lp::mean_se(y);
  EXPECT_NEAR(e.value, 0.1, 3.0 * e.se);  // 1.8 / 18
}

TEST(SampleMark, UniformMean) {
  const auto m = lp::LevyMeasureSpec::uniform(0.0, 2.0);
  lp::RngStream s({3, 0, 0, lp::StreamTag::Generic, 0});
  std::vector<double> y(20000);
  for (auto& v : y) v = lp::sample_mark(m, s);
  const auto e = lp::mean_se(y);
  EXPECT_NEAR(e.value, 1.0, 3.0 * e.se);
}

TEST(SampleMark, KsAgainstCdf) {
  for (const auto& m : {stable_half(), lp::LevyMeasureSpec::tabulated({0.0, 1.0, 2.0}, {1.0, 3.0, 1.0}),
                        lp::LevyMeasureSpec::power_law(0.0, 1.0, 0.01)}) {
    lp::RngStream s({4, 0, 0, lp::StreamTag::Generic, 0});
    std::vector<double> y(10000);
    for (auto& v : y) v = lp::sample_mark(m, s);
    EXPECT_GT(lp::ks_one_sample(y, [&](double v) { return lp::mark_cdf(m, v); }).p_value, 0.01) << lp::describe(m);
  }
}

TEST(SampleMark, QuantileMatchesSampleMark) {
  const auto m = stable_half();
  const lp::MarkQuantile q(m);
  lp::RngStream a({5, 0, 0, lp::StreamTag::Generic, 0}), b({5, 0, 0, lp::StreamTag::Generic, 0});
  for (int i = 0; i < 100; ++i) ASSERT_EQ(lp::sample_mark(m, a), q(b.uniform()));
}

TEST(Compensator, IdentityFunction) {
  EXPECT_NEAR(lp::compensator_integral(stable_half(), [](double y) { return y; }, 1.0), 1.8, 1e-9);
}

TEST(Compensator, ZeroFunction) {
  EXPECT_EQ(lp::compensator_integral(stable_half(), [](double) { return 0.0; }, 1.0), 0.0);
}

TEST(Compensator, LinearInTime) {
  auto f = [](double y) { return std::sin(3.0 * y); };
  const double one = lp::compensator_integral(stable_half(), f, 1.0);
  EXPECT_NEAR(lp::compensator_integral(stable_half(), f, 2.0), 2.0 * one, 1e-12 * std::abs(one));
}

TEST(Compensator, VectorValued) {
  const auto v = lp::compensator_integral(
      stable_half(), [](double y) { return std::vector<double>{y, y * y}; }, 0.5);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0], 0.9, 1e-9);
  EXPECT_NEAR(v[1], 0.5 * (2.0 / 3.0) * (1.0 - std::pow(0.01, 1.5)), 1e-9);
}

TEST(LaplaceExponent, ZeroAtZero) {
  EXPECT_EQ(lp::laplace_exponent(0.0, [](double y) { return y; }, stable_half(0.0)), 0.0);
}

TEST(LaplaceExponent, UniformClosedForm) {
  const double v = lp::laplace_exponent(1.0, [](double y) { return y; }, lp::LevyMeasureSpec::uniform(0.0, 1.0));
  EXPECT_NEAR(v, -std::exp(-1.0), 1e-9);  // integral of exp(-y) - 1 on [0, 1] is -1/e
}

// Oracles: scipy.integrate.quad on (0, 1]
TEST(LaplaceExponent, StableHalfSquaredMark) {
  const double v = lp::laplace_exponent(1e4, [](double y) { return y * y; }, stable_half(0.0));
  EXPECT_NEAR(v, -22.508334049303414, 1e-6 * 22.5);
}

TEST(LaplaceExponent, StableHalfLinearMark) {
  const double v = lp::laplace_exponent(1e4, [](double y) { return y; }, stable_half(0.0));
  EXPECT_NEAR(v, -352.4907701812306, 1e-6 * 352.5);
}

TEST(LaplaceExponent, UnboundedSupportMatchesScaling) {
  // on (0, inf) the exponent is exactly Gamma(-1/4) / 2 * lambda^(1/4)
  const auto m = lp::LevyMeasureSpec::power_law(0.5, kInf, 0.0);
  const double r1 = boost::math::tgamma(-0.25) / 2.0;
  EXPECT_NEAR(r1, -2.4508334, 1e-6);
  EXPECT_NEAR(lp::laplace_exponent(1e4, [](double y) { return y * y; }, m), r1 * 10.0, 1e-6 * 24.5);
}

TEST(LaplaceExponent, NonpositiveAndNonincreasing) {
  lp::RngStream s({6, 0, 0, lp::StreamTag::Generic, 0});
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> lam(8);
    for (auto& l : lam) l = std::pow(10.0, 6.0 * s.uniform());
    std::sort(lam.begin(), lam.end());
    double prev = 0.0;
    for (double l : lam) {
      const double v = lp::laplace_exponent(l, [](double y) { return y; }, stable_half(0.0));
      EXPECT_LE(v, 0.0);
      EXPECT_LE(v, prev + 1e-9);
      prev = v;
    }
  }
}

TEST(LaplaceExponent, NegativePsiFails) {
  EXPECT_THROW(lp::laplace_exponent(1.0, [](double y) { return y - 0.5; }, stable_half()), lp::Error);
}

TEST(TauberianFit, SquaredMark) {
  const auto fit = lp::tauberian_fit([](double y) { return y * y; }, stable_half(0.0), lp::log_grid(1e4, 1e14, 33));
  EXPECT_EQ(fit.regime, "tauberian");
  EXPECT_NEAR(fit.alpha, 0.25, 0.05);
  EXPECT_NEAR(fit.r1, -2.4508334, 0.05 * 2.4508334);
}

TEST(TauberianFit, LinearMark) {
  const auto fit = lp::tauberian_fit([](double y) { return y; }, stable_half(0.0), lp::log_grid(1e4, 1e14, 33));
  EXPECT_NEAR(fit.alpha, 0.5, 0.05);
  EXPECT_NEAR(fit.r1, -2.0 * std::sqrt(M_PI), 0.05 * 3.5449);
  EXPECT_NEAR(fit.beta, 1.0, 0.15);
}

TEST(TauberianFit, FiniteMassIsMassDominated) {
  const auto fit = lp::tauberian_fit([](double y) { return y; }, lp::LevyMeasureSpec::uniform(0.5, 1.0),
                                     lp::log_grid(1e2, 1e8, 20));
  EXPECT_EQ(fit.regime, "mass-dominated");
  EXPECT_FALSE(fit.ok);
  EXPECT_NEAR(fit.alpha, 0.0, 0.02);
}

TEST(TauberianFit, SyntheticPowerLaw) {
  const auto lam = lp::log_grid(1.0, 1e6, 25);
  std::vector<double> v;
  for (double l : lam) v.push_back(-1.7 * std::pow(l, 0.35));
  const auto fit = lp::tauberian_fit_values(lam, v);
  EXPECT_NEAR(fit.alpha, 0.35, 1e-3);
  EXPECT_NEAR(fit.r1, -1.7, 1e-3);
}

TEST(TauberianFit, ShortGridRejected) {
  const auto lam = lp::log_grid(1.0, 10.0, 5);
  EXPECT_THROW(lp::tauberian_fit_values(lam, std::vector<double>(5, -1.0)), lp::Error);
}

TEST(SmallBallParams, HalfStable) {
  const auto p = lp::small_ball_params(0.5, -2.0 * std::sqrt(M_PI), 1.0);
  EXPECT_NEAR(p.beta, 1.0, 1e-12);
  EXPECT_NEAR(p.r2, -M_PI, 1e-12);
}

TEST(SmallBallParams, LongerHorizon) {
  const auto p = lp::small_ball_params(0.5, -1.0, 4.0);
  EXPECT_NEAR(p.beta, 1.0, 1e-12);
  EXPECT_NEAR(p.r2, -1.0, 1e-12);
}

TEST(SmallBallParams, IdentitiesRoundTrip) {
  for (double a : {0.1, 0.25, 0.6, 0.9})
    for (double r1 : {-0.3, -2.0})
      for (double t : {0.5, 2.0}) {
        const auto p = lp::small_ball_params(a, r1, t);
        EXPECT_LT(p.r2, 0.0);
        EXPECT_NEAR(1.0 / a, 1.0 / p.beta + 1.0, 1e-12);
        const double lhs = std::pow(std::abs(a * t * r1), 1.0 / a);
        const double rhs = std::pow(std::abs(p.beta * t * p.r2), 1.0 / p.beta);
        EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
      }
}

TEST(SmallBallParams, DomainChecks) {
  EXPECT_THROW(lp::small_ball_params(1.0, -1.0, 1.0), lp::Error);
  EXPECT_THROW(lp::small_ball_params(0.5, 1.0, 1.0), lp::Error);
  EXPECT_THROW(lp::small_ball_params(0.5, -1.0, 0.0), lp::Error);
}

}  // namespace
