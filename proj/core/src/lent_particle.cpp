#include "lentparticle/lent_particle.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/constants/constants.hpp>

#include "lentparticle/error.hpp"

namespace lp {

void accumulate_malliavin(Trajectory& t) {
  if (t.K.size() != t.x.size()) flow(t);
  t.C.assign(1, SMat<double>(t.dim, t.dim));
  for (std::size_t k = 0; k < t.events.size(); ++k) {
    SMat<double> c = t.C.back();
    if (t.events[k].is_jump) c = c + congruence(t.Kbar[k + 1], t.jumps[t.events[k].jump].gamma);
    t.C.push_back(c);
  }
  t.level = std::max(t.level, 1);
}

MalliavinMatrix malliavin_matrix(const Trajectory& t) {
  if (t.C.size() != t.x.size()) fail(ErrorKind::Capability, "malliavin_matrix: accumulator missing");
  MalliavinMatrix m;
  m.t = t.horizon;
  m.gamma = t.gamma_at(-1);
  for (std::size_t k = 0; k < t.events.size(); ++k) {
    if (!t.events[k].is_jump) continue;
    const std::size_t i = t.events[k].jump;
    m.increments.emplace_back(i, congruence(t.Kbar[k + 1], t.jumps[i].gamma));
  }
  return m;
}

GradientSample gradient_sample(const Trajectory& t, const MarkedPoissonPath& enriched, int block) {
  if (enriched.size() != t.marks.size()) fail(ErrorKind::Domain, "gradient_sample: path does not match trajectory");
  GradientSample g;
  g.block = block;
  g.value = SVec<double>(t.dim);
  for (std::size_t k = 0; k < t.events.size(); ++k) {
    g.value = t.jac[k] * g.value;
    if (!t.events[k].is_jump) continue;
    const std::size_t i = t.events[k].jump;
    const JumpEval& e = t.jumps[i];
    const int p = e.flat_coef.cols();
    if (p > 0) {
      if (enriched.rho_order <= block || enriched.rho_width < p)
        fail(ErrorKind::Domain, "gradient_sample: auxiliary marks missing");
      for (int a = 0; a < p; ++a) {
        const double r = enriched.rho_mark(i, block, a);
        for (int r_ = 0; r_ < t.dim; ++r_) g.value[r_] += e.flat_coef(r_, a) * r;
      }
    }
    if (e.has_nested) {
      RngStream s = enriched.substream(i, StreamTag::RhoNested, enriched.rho_replica * 8u + static_cast<std::uint32_t>(block));
      const SVec<double> inner = wiener_flat_sample(e.nested, s);
      g.value = g.value + e.nested_outer * inner;
    }
  }
  return g;
}

double iterated_coefficient(const SimpleIntegrand& h, int k, double u) {
  if (k < 1 || k > 3) fail(ErrorKind::Domain, "iterated gradients are offered for k in 1..3");
  if (static_cast<int>(h.dh.size()) < k || !h.xi || (k >= 2 && !h.dxi) || (k >= 3 && !h.d2xi))
    fail(ErrorKind::Capability, "iterated_gradient_simple: integrand jets below the requested order");
  const double xi = h.xi(u);
  const double s = std::sqrt(xi);
  const double h1 = h.dh[0](u);
  if (k == 1) return s * h1;
  const double dxi = h.dxi(u);
  const double h2 = h.dh[1](u);
  if (k == 2) return 0.5 * dxi * h1 + xi * h2;
  // q3 = sqrt(xi) * (1/2 xi'' h' + 3/2 xi' h'' + xi h''')
  return s * (0.5 * h.d2xi(u) * h1 + 1.5 * dxi * h2 + xi * h.dh[2](u));
}

double iterated_gradient_simple(const SimpleIntegrand& h, const MarkedPoissonPath& enriched, int k) {
  if (enriched.rho_order < k) fail(ErrorKind::Domain, "iterated_gradient_simple: need k auxiliary blocks");
  double acc = 0.0;
  for (std::size_t i = 0; i < enriched.size(); ++i) {
    double prod = iterated_coefficient(h, k, enriched.jumps[i].mark);
    for (int b = 0; b < k; ++b) prod *= enriched.rho_mark(i, b);
    acc += prod;
  }
  return acc;
}

Estimate pnorm_ratio(std::span<const double> samples, double gamma, double p) {
  if (!(p > 1.0)) fail(ErrorKind::Domain, "pnorm_ratio: p must exceed 1");
  if (!(gamma > 0.0)) fail(ErrorKind::Domain, "pnorm_ratio: Gamma[F] = 0, ratio undefined");
  std::vector<double> pw(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) pw[i] = std::pow(std::abs(samples[i]), p);
  const Estimate m = mean_se(pw);
  const double norm = std::pow(m.value, 1.0 / p);
  const double g = std::sqrt(gamma);
  return {norm / g, norm / (p * m.value) * m.se / g, m.n};
}

double gaussian_norm_constant(double p) {
  const double m = std::pow(2.0, p / 2.0) * boost::math::tgamma((p + 1.0) / 2.0) / boost::math::constants::root_pi<double>();
  return std::pow(m, 1.0 / p);
}

}  // namespace lp
