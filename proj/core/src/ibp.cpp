#include "lentparticle/ibp.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/constants/constants.hpp>

#include "lentparticle/error.hpp"

namespace lp {

double delta(double x, double a_y, double gamma_xy) { return -2.0 * x * a_y - gamma_xy; }

namespace {

/// Z_1 of the second-order pass quantities (d = 1): -2A/G + T/G^2
struct ScalarZ1 {
  double a, g, t;
  double value() const { return -2.0 * a / g + t / (g * g); }
  double da() const { return -2.0 / g; }
  double dg() const { return 2.0 * a / (g * g) - 2.0 * t / (g * g * g); }
  double dt() const { return 1.0 / (g * g); }
};

double z2_scalar(const Scenario& sc, const Trajectory& traj) {
  const std::size_t n = traj.marks.size();
  // frozen direction w_i = xi_i * dX_T/dv_i
  std::vector<SVec<double>> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SMat<double> g = traj.mark_gradient(i);
    const auto& xi = traj.jumps[i].mark.xi;
    w[i] = SVec<double>(xi.size());
    for (int k = 0; k < xi.size(); ++k) w[i][k] = xi[k] * g(0, k);
  }
  const DirectionalPass p1 = directional_pass(sc, traj, w, 2);
  // derivative of the direction itself along w
  std::vector<SVec<double>> wdot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int pk = p1.xi[i].size();
    wdot[i] = SVec<double>(pk);
    for (int k = 0; k < pk; ++k) wdot[i][k] = (p1.xi[i][k] * p1.grad[i](0, k)).d1;
  }
  const DirectionalPass p2 = directional_pass(sc, traj, wdot, 2);
  const Taylor G = p1.gamma(0, 0);
  const ScalarZ1 z{p1.A[0].v, G.v, G.d1};
  const double dT = G.d2 + p2.gamma(0, 0).d1;
  const double dZ1 = z.da() * p1.A[0].d1 + z.dg() * G.d1 + z.dt() * dT;
  const double z1 = z.value();
  return -2.0 * z.a * z1 / z.g + z.t * z1 / (z.g * z.g) - dZ1 / z.g;
}

}  // namespace

PathWeights path_weights(const Scenario& sc, const Trajectory& traj, int order) {
  if (order < 1 || order > 2) fail(ErrorKind::Domain, "weights are offered for n = 1, 2");
  if (traj.level < 2 || traj.A.size() != traj.x.size() || traj.table.size() != static_cast<std::size_t>(traj.dim))
    fail(ErrorKind::Capability, "weights need the order-2 jet (generator path and Gamma table)");
  if (order == 2 && traj.dim != 1) fail(ErrorKind::Capability, "Z_2 is offered for d = 1 only");
  const int d = traj.dim;
  PathWeights pw;
  pw.x = traj.terminal();
  pw.gamma = traj.gamma_at(-1);
  pw.A = traj.A.back();
  pw.z1 = SVec<double>(d);
  if (!(std::abs(determinant(pw.gamma)) >= kGammaDetFloor)) {
    pw.rejected = true;
    pw.has_z2 = order == 2;
    return pw;
  }
  const SMat<double> gi = inverse(pw.gamma);
  for (int i = 0; i < d; ++i) {
    double z = 0.0;
    for (int j = 0; j < d; ++j) z -= 2.0 * pw.A[j] * gi(j, i);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) z += gi(j, k) * traj.table[j].dGamma(k, l) * gi(l, i);
    pw.z1[i] = z;
  }
  if (order == 2) {
    pw.has_z2 = true;
    pw.z2 = z2_scalar(sc, traj);
  }
  return pw;
}

WeightResult weight(std::span<const PathWeights> paths, std::span<const int> index) {
  WeightResult r;
  r.order = static_cast<int>(index.size());
  r.index.assign(index.begin(), index.end());
  if (r.order < 1 || r.order > 2) fail(ErrorKind::Domain, "weight: order must be 1 or 2");
  r.z.reserve(paths.size());
  for (const auto& p : paths) {
    if (p.rejected) {
      ++r.rejected;
      r.z.push_back(0.0);
      continue;
    }
    if (r.order == 1) {
      if (index[0] < 0 || index[0] >= p.z1.size()) fail(ErrorKind::Domain, "weight: index out of range");
      r.z.push_back(p.z1[index[0]]);
    } else {
      if (!p.has_z2) fail(ErrorKind::Capability, "weight: paths were evaluated without Z_2");
      r.z.push_back(p.z2);
    }
  }
  return r;
}

IbpEstimate expectation_ibp(const StateFunction& f, const StateFunction& df, std::span<const SVec<double>> samples,
                            const WeightResult& w) {
  if (samples.size() != w.z.size()) fail(ErrorKind::Domain, "expectation_ibp: sample and weight counts differ");
  std::vector<double> fz(samples.size()), d(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    fz[i] = f(samples[i]) * w.z[i];
    if (df) d[i] = df(samples[i]);
  }
  IbpEstimate e;
  e.weighted = mean_se(fz);
  if (df) {
    e.has_direct = true;
    e.direct = mean_se(d);
    e.difference = paired_difference(d, fz);
  }
  return e;
}

double silverman_bandwidth(std::span<const double> samples) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double sd = std::sqrt(variance(s));
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (!(spread > 0.0)) spread = 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(s.size()), -0.2);
}

std::vector<double> density_grid(std::span<const double> samples, int n) {
  if (n < 2) fail(ErrorKind::Domain, "density_grid: need at least two points");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double lo = quantile_sorted(s, 0.001), hi = quantile_sorted(s, 0.999);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

DensityEstimate density_ibp(std::span<const double> samples, std::span<const double> z1, std::span<const double> grid) {
  if (samples.size() != z1.size()) fail(ErrorKind::Domain, "density_ibp: sample and weight counts differ");
  DensityEstimate out;
  out.grid.assign(grid.begin(), grid.end());
  out.bandwidth = silverman_bandwidth(samples);
  const double h = out.bandwidth;
  const double norm = 1.0 / (h * std::sqrt(2.0 * boost::math::constants::pi<double>()));
  const std::size_t n = samples.size();
  std::vector<double> term(n);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double inner_lo = *mn + 2.0 * h, inner_hi = *mx - 2.0 * h;
  for (double x : grid) {
    for (std::size_t i = 0; i < n; ++i) term[i] = samples[i] >= x ? z1[i] : 0.0;
    const Estimate p = mean_se(term);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (samples[i] - x) / h;
      term[i] = norm * std::exp(-0.5 * u * u);
    }
    const Estimate k = mean_se(term);
    out.ibp.push_back(p.value);
    out.ibp_se.push_back(p.se);
    out.kde.push_back(k.value);
    out.kde_se.push_back(k.se);
    const bool inner = x >= inner_lo && x <= inner_hi;
    out.compared.push_back(inner);
    const double se = std::hypot(p.se, k.se);
    if (inner && se > 0.0) out.max_z = std::max(out.max_z, std::abs(p.value - k.value) / se);
  }
  for (std::size_t i = 1; i < grid.size(); ++i)
    out.integral += 0.5 * (out.ibp[i] + out.ibp[i - 1]) * (grid[i] - grid[i - 1]);
  // the same trapezoid rule path by path gives the SE of the integral
  for (std::size_t i = 0; i < n; ++i) {
    double len = 0.0;
    for (std::size_t g = 1; g < grid.size(); ++g)
      len += 0.5 * ((samples[i] >= grid[g]) + (samples[i] >= grid[g - 1])) * (grid[g] - grid[g - 1]);
    term[i] = len * z1[i];
  }
  out.integral_se = mean_se(term).se;
  return out;
}

AdjointTerms adjoint_terms(const AdjointTriple& t, const PathWeights& pw, std::span<const SVec<double>> grad_samples) {
  AdjointTerms out;
  if (pw.rejected) return out;
  const SVec<double>& x = pw.x;
  const SVec<double> dh = t.dh(x);
  double acc = 0.0;
  for (const auto& s : grad_samples) {
    double zs = 0.0;
    for (int k = 0; k < s.size(); ++k) zs += dh[k] * s[k];
    acc += zs * s[t.y];
  }
  const double gx = t.g(x);
  out.lhs = gx * acc / static_cast<double>(grad_samples.size());
  const SVec<double> dg = t.dg(x);
  double gamma_xy = 0.0;
  for (int k = 0; k < x.size(); ++k) gamma_xy += dg[k] * pw.gamma(k, t.y);
  out.rhs = t.h(x) * delta(gx, pw.A[t.y], gamma_xy);
  return out;
}

}  // namespace lp
