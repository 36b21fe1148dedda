#pragma once
/// Malliavin covariance by the lent particle formula, and its Monte Carlo
/// counterpart through gradient samples over auxiliary marks.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lentparticle/jumpsde.hpp"
#include "lentparticle/stats.hpp"

namespace lp {

struct MalliavinMatrix {
  double t = 0.0;
  SMat<double> gamma;
  /// jump index -> Kbar gamma[c] Kbar^T contribution to C
  std::vector<std::pair<std::size_t, SMat<double>>> increments;
};

/// Fills traj.C (flow is computed first when missing).
void accumulate_malliavin(Trajectory& traj);

/// Gamma[X_T] = K_T C_T K_T^T; needs accumulate_malliavin.
MalliavinMatrix malliavin_matrix(const Trajectory& traj);

struct GradientSample {
  SVec<double> value;
  int block = 0;
};

/// X^# along the path, using auxiliary block `block` of `enriched` (which must
/// be the same jump configuration as traj, enriched by attach_rho_marks).
GradientSample gradient_sample(const Trajectory& traj, const MarkedPoissonPath& enriched, int block = 0);

/// F = sum_i h(u_i) with the mark weight xi; the k-th iterated gradient
/// F^(k#) = sum_i q_k(u_i) G^1_i ... G^k_i for k <= 3.
struct SimpleIntegrand {
  std::vector<std::function<double(double)>> dh;  // h', h'', h''' (as many as supplied)
  std::function<double(double)> xi, dxi, d2xi;
};

/// q_k for the given order, at mark u.
double iterated_coefficient(const SimpleIntegrand& h, int k, double u);
double iterated_gradient_simple(const SimpleIntegrand& h, const MarkedPoissonPath& enriched, int k);

/// ||F^#||_p / Gamma[F]^{1/2} with delta-method SE.
Estimate pnorm_ratio(std::span<const double> samples, double gamma, double p);

/// E|N(0,1)|^p ^ (1/p)
double gaussian_norm_constant(double p);

}  // namespace lp
