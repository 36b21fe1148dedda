#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lentparticle/bottom.hpp"
#include "lentparticle/stats.hpp"

namespace {

using lp::MarkJets;
using lp::SMat;
using lp::SVec;

// jets of c(u) = (u, u^2 / 2) or c(u) = u, with a weight xi(u) and a power-law density u^-1.5
MarkJets<double> jets(int d, double u, double xi, double dxi, double score) {
  MarkJets<double> j;
  j.dvc = SMat<double>(d, 1);
  j.d2vc = SMat<double>(d, 1);
  j.dvc(0, 0) = 1.0;
  if (d == 2) {
    j.dvc(1, 0) = u;
    j.d2vc(1, 0) = 1.0;
  }
  j.xi = SVec<double>(1);
  j.dxi = SVec<double>(1);
  j.score = SVec<double>(1);
  j.xi[0] = xi;
  j.dxi[0] = dxi;
  j.score[0] = score;
  return j;
}

TEST(EuclideanGamma, UnitDerivative) {
  EXPECT_DOUBLE_EQ(lp::euclidean_gamma(jets(1, 0.4, 1.0, 0.0, 0.0))(0, 0), 1.0);
}

TEST(EuclideanGamma, TwoComponents) {
  const double u = 0.7;
  const auto g = lp::euclidean_gamma(jets(2, u, 1.0, 0.0, 0.0));
  EXPECT_DOUBLE_EQ(g(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g(0, 1), u);
  EXPECT_DOUBLE_EQ(g(1, 0), u);
  EXPECT_DOUBLE_EQ(g(1, 1), u * u);
  // central finite difference of d_u c_2 = u
  const double h = 1e-5;
  const double fd = ((u + h) * (u + h) / 2.0 - (u - h) * (u - h) / 2.0) / (2.0 * h);
  EXPECT_NEAR(g(0, 1), fd, 1e-9);
}

TEST(EuclideanGamma, ChainRuleWithWeight) {
  const double u = 0.3;
  EXPECT_DOUBLE_EQ(lp::euclidean_gamma(jets(1, u, u * u, 2.0 * u, 0.0))(0, 0), u * u);
}

TEST(EuclideanGenerator, ConstantCoefficientIsZero) {
  auto j = jets(1, 0.5, 0.25, 1.0, -3.0);
  j.dvc(0, 0) = 0.0;
  EXPECT_EQ(lp::euclidean_generator(j)[0], 0.0);
}

TEST(EuclideanGenerator, PowerLawDensity) {
  for (double u : {0.05, 0.3, 0.9}) {
    const auto a = lp::euclidean_generator(jets(1, u, u * u, 2.0 * u, -1.5 / u));
    EXPECT_NEAR(a[0], 0.25 * u, 1e-15);
  }
}

lp::BottomCoordinate power_coordinate(double lo, double hi) {
  lp::BottomCoordinate b;
  b.xi = [](double u) { return u * u; };
  b.dxi = [](double u) { return 2.0 * u; };
  b.density = [](double u) { return std::pow(u, -1.5); };
  b.score = [](double u) { return -1.5 / u; };
  b.lo = lo;
  b.hi = hi;
  return b;
}

TEST(GeneratorSymmetry, CubicPairVanishingAtEnds) {
  const double a = 0.01, b = 1.0;
  lp::TestFunction f{[=](double u) { return (u - a) * (b - u) * u; },
                     [=](double u) { return -3.0 * u * u + 2.0 * (a + b) * u - a * b; },
                     [=](double u) { return -6.0 * u + 2.0 * (a + b); }};
  lp::TestFunction g{[=](double u) { return (u - a) * (b - u); }, [=](double u) { return a + b - 2.0 * u; },
                     [](double) { return -2.0; }};
  const auto r = lp::generator_symmetry(power_coordinate(a, b), f, g);
  EXPECT_GT(std::abs(r.rhs), 1e-3);
  EXPECT_LT(std::abs(r.residual), 1e-6);
}

TEST(GeneratorSymmetry, BoundaryTermsBreakIt) {
  lp::TestFunction f{[](double u) { return u; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
  const auto r = lp::generator_symmetry(power_coordinate(0.01, 1.0), f, f);
  EXPECT_GT(std::abs(r.residual), 1e-3);
}

TEST(FlatSample, ZeroDerivativeGivesZero) {
  auto j = jets(1, 0.5, 1.0, 0.0, 0.0);
  j.dvc(0, 0) = 0.0;
  lp::RngStream s({1, 0, 0, lp::StreamTag::Rho, 0});
  EXPECT_EQ(lp::flat_sample_euclidean(j, s)[0], 0.0);
}

TEST(FlatSample, CovarianceMatchesGamma) {
  lp::RngStream probe({2, 0, 0, lp::StreamTag::Generic, 0});
  for (int trial = 0; trial < 20; ++trial) {
    const double u = 0.01 + 0.99 * probe.uniform();
    const auto j = jets(2, u, u * u, 2.0 * u, -1.5 / u);
    const auto g = lp::euclidean_gamma(j);
    lp::RngStream s({2, static_cast<std::uint64_t>(trial), 0, lp::StreamTag::Rho, 0});
    const std::size_t n = 10000;
    std::vector<double> x0(n), s00(n), s01(n), s11(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = lp::flat_sample_euclidean(j, s);
      x0[i] = v[0];
      s00[i] = v[0] * v[0];
      s01[i] = v[0] * v[1];
      s11[i] = v[1] * v[1];
    }
    const auto m = lp::mean_se(x0);
    EXPECT_NEAR(m.value, 0.0, 3.0 * m.se);
    const auto e00 = lp::mean_se(s00), e01 = lp::mean_se(s01), e11 = lp::mean_se(s11);
    EXPECT_NEAR(e00.value, g(0, 0), 3.0 * e00.se) << "u = " << u;
    EXPECT_NEAR(e01.value, g(0, 1), 3.0 * e01.se) << "u = " << u;
    EXPECT_NEAR(e11.value, g(1, 1), 3.0 * e11.se) << "u = " << u;
  }
}

lp::WienerOUBottom brownian_bottom(int d) {
  lp::WienerOUBottom w;
  w.d = d;
  w.q = d;
  w.a = [d](const SVec<double>&) { return SMat<double>::identity(d); };
  w.da = [d](const SVec<double>&) { return std::vector<SMat<double>>(static_cast<std::size_t>(d), SMat<double>(d, d)); };
  return w;
}

TEST(WienerOU, ConstantDiffusion) {
  lp::RngStream s({3, 0, 0, lp::StreamTag::NestedBrownian, 0});
  const auto inc = lp::nested_brownian(0.3, 0.01, 2, s);
  const auto ev = lp::wiener_ou_eval(brownian_bottom(2), SVec<double>(2), inc);
  EXPECT_NEAR(ev.gamma_m(0, 0), 0.3, 1e-12);
  EXPECT_NEAR(ev.gamma_m(1, 1), 0.3, 1e-12);
  EXPECT_NEAR(ev.gamma_m(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(ev.displacement[0], inc.terminal(0), 1e-14);
  EXPECT_EQ(ev.m(0, 0), 1.0);
}

TEST(WienerOU, ZeroDuration) {
  lp::RngStream s({3, 1, 0, lp::StreamTag::NestedBrownian, 0});
  const auto ev = lp::wiener_ou_eval(brownian_bottom(2), SVec<double>(2), lp::nested_brownian(0.0, 0.01, 2, s));
  EXPECT_EQ(ev.gamma_m(0, 0), 0.0);
  EXPECT_EQ(ev.m(1, 1), 1.0);
  EXPECT_EQ(ev.m(0, 1), 0.0);
}

TEST(WienerOU, QuadraticOuterMapGivesSimpleExampleIncrement) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    lp::RngStream s({4, k, 0, lp::StreamTag::NestedBrownian, 0});
    const double y = 0.1 + 0.1 * static_cast<double>(k);
    const auto ev = lp::wiener_ou_eval(brownian_bottom(1), SVec<double>(1), lp::nested_brownian(y, 0.01, 1, s));
    const double b = ev.displacement[0];
    SMat<double> jac(2, 1);
    jac(0, 0) = 1.0;
    jac(1, 0) = b;  // F(z) = (z, z^2 / 2)
    const auto g = lp::push_forward_gamma(jac, ev.gamma_m);
    EXPECT_NEAR(g(0, 0), y, 1e-12);
    EXPECT_NEAR(g(0, 1), y * b, 1e-12);
    EXPECT_NEAR(g(1, 1), y * b * b, 1e-12);
  }
}

TEST(WienerOU, MeanRevertingInverseFlow) {
  const double kappa = 2.0, y = 0.5;
  lp::WienerOUBottom w = brownian_bottom(1);
  w.b = [=](const SVec<double>& z) {
    SVec<double> r(1);
    r[0] = -kappa * z[0];
    return r;
  };
  w.db = [=](const SVec<double>&) {
    SMat<double> r(1, 1);
    r(0, 0) = -kappa;
    return r;
  };
  lp::RngStream s({5, 0, 0, lp::StreamTag::NestedBrownian, 0});
  const auto ev = lp::wiener_ou_eval(w, SVec<double>(1), lp::nested_brownian(y, 1e-4, 1, s));
  EXPECT_NEAR(ev.m(0, 0), std::exp(-kappa * y), 1e-3);
  EXPECT_NEAR(ev.gamma_m(0, 0), (1.0 - std::exp(-2.0 * kappa * y)) / (2.0 * kappa), 1e-3);
  EXPECT_LT(ev.inverse_defect, 1e-3);
}

TEST(WienerOU, FlatSampleCovariance) {
  lp::WienerOUBottom w = brownian_bottom(1);
  w.a = [](const SVec<double>& z) {
    SMat<double> r(1, 1);
    r(0, 0) = 1.0 + 0.5 * std::sin(z[0]);
    return r;
  };
  w.da = [](const SVec<double>& z) {
    SMat<double> r(1, 1);
    r(0, 0) = 0.5 * std::cos(z[0]);
    return std::vector<SMat<double>>{r};
  };
  lp::RngStream s({6, 0, 0, lp::StreamTag::NestedBrownian, 0});
  const auto ev = lp::wiener_ou_eval(w, SVec<double>(1), lp::nested_brownian(0.4, 0.02, 1, s), true);
  lp::RngStream rho({6, 0, 0, lp::StreamTag::RhoNested, 0});
  std::vector<double> sq(10000);
  for (auto& v : sq) {
    const double f = lp::wiener_flat_sample(ev, rho)[0];
    v = f * f;
  }
  const auto e = lp::mean_se(sq);
  EXPECT_NEAR(e.value, ev.gamma_m(0, 0), 3.0 * e.se);
}

}  // namespace
