#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "lentparticle/error.hpp"
#include "lentparticle/parallel.hpp"
#include "lentparticle/rng.hpp"
#include "lentparticle/stats.hpp"

namespace {

using Block = std::array<std::uint32_t, 4>;

// Random123 known-answer vectors for philox4x32_10
TEST(Philox, KnownAnswerZero) {
  EXPECT_EQ(lp::philox4x32_10({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const std::uint32_t f = 0xffffffffu;
  EXPECT_EQ(lp::philox4x32_10({f, f, f, f}, {f, f}), (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  EXPECT_EQ(lp::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, SameAddressReplays) {
  lp::StreamKey k{7, 3, 11, lp::StreamTag::Mark, 2};
  lp::RngStream a(k), b(k);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, AddressesAreDistinct) {
  std::set<std::uint64_t> first;
  const std::vector<lp::StreamKey> keys = {
      {1, 0, 0, lp::StreamTag::Skeleton, 0}, {2, 0, 0, lp::StreamTag::Skeleton, 0},
      {1, 1, 0, lp::StreamTag::Skeleton, 0}, {1, 0, 1, lp::StreamTag::Skeleton, 0},
      {1, 0, 0, lp::StreamTag::Mark, 0},     {1, 0, 0, lp::StreamTag::Skeleton, 1},
      {1, 1ull << 40, 0, lp::StreamTag::Skeleton, 0}, {1, 0, 1ull << 33, lp::StreamTag::Skeleton, 0}};
  for (const auto& k : keys) first.insert(lp::RngStream(k).next_u64());
  EXPECT_EQ(first.size(), keys.size());
}

TEST(RngStream, RejectsLargeSubIndex) {
  lp::StreamKey k;
  k.sub = 1u << 24;
  EXPECT_THROW(lp::RngStream{k}, lp::Error);
}

TEST(RngStream, UniformIsOpenAndCentred) {
  lp::RngStream s({5, 0, 0, lp::StreamTag::Generic, 0});
  std::vector<double> u(100000);
  for (auto& x : u) {
    x = s.uniform();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  const auto e = lp::mean_se(u);
  EXPECT_NEAR(e.value, 0.5, 3.0 * e.se);
  EXPECT_GT(lp::ks_one_sample(u, [](double x) { return x; }).p_value, 0.01);
}

TEST(RngStream, GaussianMoments) {
  lp::RngStream s({5, 1, 0, lp::StreamTag::Generic, 0});
  std::vector<double> g(100000), g2(100000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = s.gaussian();
    g2[i] = g[i] * g[i];
  }
  const auto m = lp::mean_se(g), v = lp::mean_se(g2);
  EXPECT_NEAR(m.value, 0.0, 3.0 * m.se);
  EXPECT_NEAR(v.value, 1.0, 3.0 * v.se);
  EXPECT_GT(lp::ks_one_sample(g, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }).p_value, 0.01);
}

TEST(RngStream, RademacherBalanced) {
  lp::RngStream s({5, 2, 0, lp::StreamTag::Generic, 0});
  std::vector<double> r(40000);
  for (auto& x : r) {
    x = s.rademacher();
    ASSERT_TRUE(x == 1.0 || x == -1.0);
  }
  const auto m = lp::mean_se(r);
  EXPECT_NEAR(m.value, 0.0, 3.0 * m.se);
}

TEST(ParallelMap, ResultIndependentOfWorkers) {
  auto f = [](std::size_t i) {
    lp::RngStream s({9, i, 0, lp::StreamTag::Generic, 0});
    return s.gaussian();
  };
  EXPECT_EQ(lp::parallel_map(1000, 1, f), lp::parallel_map(1000, 8, f));
}

TEST(ParallelMap, PropagatesErrors) {
  auto f = [](std::size_t i) -> int {
    if (i == 17) lp::fail(lp::ErrorKind::Numeric, "boom");
    return static_cast<int>(i);
  };
  EXPECT_THROW(lp::parallel_map(100, 4, f), lp::Error);
}

TEST(ParallelMap, EnvironmentSetsDefaultWorkers) {
  ::setenv(lp::kWorkersEnv, "3", 1);
  EXPECT_EQ(lp::default_workers(), 3);
  ::setenv(lp::kWorkersEnv, "zero", 1);
  EXPECT_GE(lp::default_workers(), 1);
  ::unsetenv(lp::kWorkersEnv);
}

}  // namespace
