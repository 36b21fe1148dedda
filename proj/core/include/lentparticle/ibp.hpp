#pragma once
/// Integration-by-parts weights Z_1 (any d) and Z_2 (d = 1), with
/// E[d f(X)] = E[f(X) Z], plus weighted and kernel density estimators.

#include <functional>
#include <span>
#include <vector>

#include "lentparticle/jumpsde.hpp"
#include "lentparticle/stats.hpp"

namespace lp {

inline constexpr double kGammaDetFloor = 1e-10;

/// delta[X Y^#] = -2 X A[Y] - Gamma[X, Y]
double delta(double x, double a_y, double gamma_xy);

struct PathWeights {
  bool rejected = false;
  SVec<double> x;       // X_T
  SMat<double> gamma;   // Gamma[X_T]
  SVec<double> A;       // A[X_T]
  SVec<double> z1;      // Z_1 for each coordinate
  bool has_z2 = false;
  double z2 = 0.0;
};

/// Weights of one path. The trajectory must carry the order-2 jet (A and the
/// Gamma table). order 2 requires d = 1.
PathWeights path_weights(const Scenario& sc, const Trajectory& traj, int order);

struct WeightResult {
  int order = 1;
  std::vector<int> index;
  std::vector<double> z;
  std::size_t rejected = 0;
  double rejection_fraction() const { return z.empty() ? 0.0 : static_cast<double>(rejected) / static_cast<double>(z.size()); }
  bool warn() const { return rejection_fraction() > 0.01; }
};

/// Z_n for the multi-index (one entry for n = 1, {0, 0} for n = 2).
WeightResult weight(std::span<const PathWeights> paths, std::span<const int> index);

using StateFunction = std::function<double(const SVec<double>&)>;

struct IbpEstimate {
  Estimate direct;      // E[d f(X)]  (when the derivative is supplied)
  Estimate weighted;    // E[f(X) Z]
  Estimate difference;  // paired direct - weighted
  bool has_direct = false;
};

IbpEstimate expectation_ibp(const StateFunction& f, const StateFunction& df, std::span<const SVec<double>> samples,
                            const WeightResult& w);

struct DensityEstimate {
  std::vector<double> grid, ibp, ibp_se, kde, kde_se;
  double bandwidth = 0.0;
  double integral = 0.0;  // trapezoid integral of the weighted estimate
  double integral_se = 0.0;
  /// max of |ibp - kde| / sqrt(ibp_se^2 + kde_se^2) over the compared points
  double max_z = 0.0;
  /// false within two bandwidths of the sample extremes, where the kernel
  /// estimate is biased by the support edge and is not a usable reference
  std::vector<bool> compared;
};

double silverman_bandwidth(std::span<const double> samples);
/// Grid of n points between the 0.001 and 0.999 sample quantiles.
std::vector<double> density_grid(std::span<const double> samples, int n);
/// p(x) = E[1{X >= x} Z_1] next to a Gaussian KDE on the same grid.
DensityEstimate density_ibp(std::span<const double> samples, std::span<const double> z1, std::span<const double> grid);

/// Per-path terms of E[X Gamma[Z, Y]] = E[Z delta[X Y^#]] with X = g(X_T),
/// Y = X_T[y] and Z = h(X_T); the left side averages Z^# Y^# over gradient samples.
struct AdjointTriple {
  StateFunction g;
  std::function<SVec<double>(const SVec<double>&)> dg;
  int y = 0;
  StateFunction h;
  std::function<SVec<double>(const SVec<double>&)> dh;
};

struct AdjointTerms {
  double lhs = 0.0;
  double rhs = 0.0;
};

AdjointTerms adjoint_terms(const AdjointTriple& t, const PathWeights& pw, std::span<const SVec<double>> grad_samples);

}  // namespace lp
