#include "lentparticle/bottom.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "lentparticle/error.hpp"
#include "lentparticle/quadrature.hpp"

namespace lp {

SMat<double> flat_coefficients(const MarkJets<double>& j) {
  const int d = j.dvc.rows(), p = j.dvc.cols();
  SMat<double> f(d, p);
  for (int k = 0; k < p; ++k) {
    const double s = std::sqrt(std::max(0.0, j.xi[k]));
    for (int i = 0; i < d; ++i) f(i, k) = s * j.dvc(i, k);
  }
  return f;
}

SVec<double> flat_sample_euclidean(const MarkJets<double>& j, std::span<const double> rho) {
  const int d = j.dvc.rows(), p = j.dvc.cols();
  if (static_cast<int>(rho.size()) < p) fail(ErrorKind::Domain, "flat_sample: rho block too short");
  SVec<double> out(d);
  for (int k = 0; k < p; ++k) {
    const double s = std::sqrt(std::max(0.0, j.xi[k]));
    for (int i = 0; i < d; ++i) out[i] += s * j.dvc(i, k) * rho[static_cast<std::size_t>(k)];
  }
  return out;
}

SVec<double> flat_sample_euclidean(const MarkJets<double>& j, RngStream& stream, RhoBasis basis) {
  std::vector<double> rho(static_cast<std::size_t>(j.dvc.cols()));
  for (auto& r : rho) r = basis == RhoBasis::Gaussian ? stream.gaussian() : stream.rademacher();
  return flat_sample_euclidean(j, rho);
}

double euclidean_generator_scalar(const BottomCoordinate& b, double u, double f1, double f2) {
  const double s = b.score(u);
  if (!std::isfinite(s)) fail(ErrorKind::Domain, fmt::format("generator: log-density derivative diverges at u = {}", u));
  const double xi = b.xi(u);
  return 0.5 * xi * f2 + 0.5 * (b.dxi(u) + xi * s) * f1;
}

SymmetryCheck generator_symmetry(const BottomCoordinate& b, const TestFunction& f, const TestFunction& g) {
  QuadOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-13;
  // no endpoint singularity on the catalog coordinates; split into a few
  // equal pieces for finite ranges
  opt.max_splits = 0;
  auto lhs_f = [&](double u) {
    const double m = b.density(u);
    if (m == 0.0) return 0.0;
    return euclidean_generator_scalar(b, u, f.df(u), f.d2f(u)) * g.f(u) * m;
  };
  auto rhs_f = [&](double u) { return -0.5 * b.xi(u) * f.df(u) * g.df(u) * b.density(u); };
  SymmetryCheck out;
  if (std::isfinite(b.lo) && std::isfinite(b.hi)) {
    const int pieces = 16;
    for (int k = 0; k < pieces; ++k) {
      const double a0 = b.lo + (b.hi - b.lo) * k / pieces;
      const double a1 = b.lo + (b.hi - b.lo) * (k + 1) / pieces;
      out.lhs += integrate(lhs_f, a0, a1, opt).value;
      out.rhs += integrate(rhs_f, a0, a1, opt).value;
    }
  } else {
    out.lhs = integrate(lhs_f, b.lo, b.hi, opt).value;
    out.rhs = integrate(rhs_f, b.lo, b.hi, opt).value;
  }
  out.residual = out.lhs - out.rhs;
  return out;
}

WienerEval wiener_ou_eval(const WienerOUBottom& w, const SVec<double>& x, const BrownianIncrements& inc,
                          bool keep_flat_steps) {
  const int d = w.d, q = w.q;
  if (x.size() != d) fail(ErrorKind::Domain, "wiener_ou_eval: state dimension mismatch");
  if (inc.dim != q) fail(ErrorKind::Domain, "wiener_ou_eval: Brownian dimension mismatch");
  WienerEval ev;
  SVec<double> z = x;
  SMat<double> m = SMat<double>::identity(d);
  SMat<double> mi = SMat<double>::identity(d);
  SMat<double> acc(d, d);  // sum M_{k+1}^{-1} a a^T M_{k+1}^{-T} dt
  SVec<double> tangent(d);
  const bool with_param = static_cast<bool>(w.b_param);
  std::vector<SMat<double>> pre;  // M_{k+1}^{-1} a(zeta_k), completed with M_y at the end
  const std::size_t n = inc.steps();
  if (keep_flat_steps) pre.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = inc.dt[k];
    SVec<double> dwk(q);
    for (int j = 0; j < q; ++j) dwk[j] = inc.dw[k * static_cast<std::size_t>(q) + static_cast<std::size_t>(j)];
    const SMat<double> ak = w.a(z);
    const std::vector<SMat<double>> dak = w.da(z);
    const SVec<double> bk = w.b ? w.b(z) : SVec<double>(d);
    const SMat<double> dbk = w.db ? w.db(z) : SMat<double>(d, d);

    // Jacobian of the Euler step and the increment of the M^{-1} equation
    SMat<double> step = SMat<double>::identity(d);
    SMat<double> inv_incr(d, d);  // -sum a'_j dW_j - b' dt + sum (a'_j)^2 dt
    for (int j = 0; j < q; ++j) {
      step = step + scale(dak[static_cast<std::size_t>(j)], dwk[j]);
      inv_incr = inv_incr - scale(dak[static_cast<std::size_t>(j)], dwk[j]);
      inv_incr = inv_incr + scale(dak[static_cast<std::size_t>(j)] * dak[static_cast<std::size_t>(j)], dt);
    }
    step = step + scale(dbk, dt);
    inv_incr = inv_incr - scale(dbk, dt);

    if (with_param) {
      SVec<double> t2 = step * tangent;
      const SVec<double> bp = w.b_param(z);
      for (int i = 0; i < d; ++i) t2[i] += bp[i] * dt;
      tangent = t2;
    }
    SVec<double> zn = z + ak * dwk;
    for (int i = 0; i < d; ++i) zn[i] += bk[i] * dt;
    m = step * m;
    mi = mi + mi * inv_incr;

    if (max_abs(mi) > w.overflow_limit || max_abs(m) > w.overflow_limit || !std::isfinite(max_abs(mi)))
      fail(ErrorKind::Numeric, fmt::format("wiener_ou_eval: inverse flow overflow at nested step {} of {}", k, n));
    ev.inverse_defect = std::max(ev.inverse_defect, max_abs(m * mi - SMat<double>::identity(d)));

    const SMat<double> g = mi * ak;  // M_{k+1}^{-1} a(zeta_k)
    acc = acc + scale(g * transpose(g), dt);
    if (keep_flat_steps) pre.push_back(g);
    z = zn;
  }
  ev.displacement = z - x;
  ev.m = m;
  ev.m_inv = mi;
  ev.gamma_m = congruence(m, acc);
  ev.param_tangent = tangent;
  if (keep_flat_steps) {
    ev.flat_steps.reserve(pre.size());
    for (const auto& g : pre) ev.flat_steps.push_back(m * g);
    ev.dt = inc.dt;
  }
  return ev;
}

SVec<double> wiener_flat_sample(const WienerEval& ev, RngStream& rho) {
  if (ev.flat_steps.empty()) return SVec<double>(ev.displacement.size());
  const int d = ev.flat_steps.front().rows(), q = ev.flat_steps.front().cols();
  SVec<double> out(d);
  for (std::size_t k = 0; k < ev.flat_steps.size(); ++k) {
    const double sh = std::sqrt(ev.dt[k]);
    for (int j = 0; j < q; ++j) {
      const double g = sh * rho.gaussian();
      for (int i = 0; i < d; ++i) out[i] += ev.flat_steps[k](i, j) * g;
    }
  }
  return out;
}

SMat<double> push_forward_gamma(const SMat<double>& jac, const SMat<double>& gamma) { return congruence(jac, gamma); }

}  // namespace lp
