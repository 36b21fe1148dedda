#include "lentparticle/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "lentparticle/error.hpp"
#include "lentparticle/jump_measure.hpp"

namespace lp {

InverseMoment inverse_moment(std::span<const double> samples, double p) {
  InverseMoment r;
  std::vector<double> inv;
  inv.reserve(samples.size());
  for (double s : samples) {
    if (s < 0.0) fail(ErrorKind::Domain, "inverse_moment: negative sample");
    if (s == 0.0) {
      ++r.zeros;
      continue;
    }
    inv.push_back(std::pow(s, -p));
  }
  if (r.zeros > 0) {
    r.verdict = "infinite moment";
    r.estimate.value = std::numeric_limits<double>::infinity();
    r.estimate.n = samples.size();
    return r;
  }
  if (inv.size() < 2) fail(ErrorKind::Domain, "inverse_moment: need at least two samples");
  r.estimate = mean_se(inv);
  r.half_sample = mean_se(std::span<const double>(inv.data(), inv.size() / 2)).value;
  r.ratio = r.estimate.value / r.half_sample;
  r.stable = r.ratio >= 0.9 && r.ratio <= 1.1;
  r.verdict = r.stable ? "stable" : "unstable";
  return r;
}

namespace {

struct SmallBallData {
  std::vector<double> log_eps, log_p, w, eps;
};

LinearFit fit_at(const SmallBallData& d, double beta, double prefactor, std::vector<double>* xs = nullptr) {
  std::vector<double> x(d.eps.size()), y(d.eps.size());
  for (std::size_t i = 0; i < d.eps.size(); ++i) {
    x[i] = std::exp(-beta * d.log_eps[i]);
    y[i] = d.log_p[i] - prefactor * beta * d.log_eps[i];
  }
  if (xs) *xs = x;
  return linear_fit(x, y, d.w);
}

}  // namespace

SmallBallFit small_ball_fit(std::span<const double> samples, std::vector<double> grid, double prefactor) {
  SmallBallFit out;
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  if (n < 100) fail(ErrorKind::Domain, "small_ball_fit: too few samples");
  if (grid.empty()) {
    const double lo = quantile_sorted(s, 1e-3), hi = quantile_sorted(s, 0.1);
    if (!(lo > 0.0) || !(hi > lo)) fail(ErrorKind::Domain, "small_ball_fit: degenerate sample quantiles");
    grid = log_grid(lo, hi, 30);
  }
  std::sort(grid.begin(), grid.end());
  // shrink from below until the smallest eps sees enough samples
  constexpr std::size_t kMinCount = 20;
  std::size_t first = 0;
  auto count_at = [&](double e) {
    return static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), e) - s.begin());
  };
  while (first < grid.size() && count_at(grid[first]) < kMinCount) ++first;
  if (first > 0) out.warnings.push_back(fmt::format("grid shrunk: dropped {} points with fewer than {} samples", first, kMinCount));
  grid.erase(grid.begin(), grid.begin() + static_cast<long>(first));
  if (grid.size() < 4) fail(ErrorKind::Domain, "small_ball_fit: fewer than 4 usable grid points");

  SmallBallData d;
  for (double e : grid) {
    const std::size_t c = count_at(e);
    const double pr = static_cast<double>(c) / static_cast<double>(n);
    d.eps.push_back(e);
    d.log_eps.push_back(std::log(e));
    d.log_p.push_back(std::log(pr));
    d.w.push_back(static_cast<double>(c) / std::max(1e-12, 1.0 - pr));
    out.counts.push_back(c);
  }
  for (std::size_t i = 1; i < d.log_p.size(); ++i)
    if (d.log_p[i] < d.log_p[i - 1]) out.monotone = false;

  // Brent: golden-section steps with parabolic acceleration
  const auto best = boost::math::tools::brent_find_minima(
      [&](double b) { return -fit_at(d, b, prefactor).r2; }, kSmallBallBetaMin, kSmallBallBetaMax, 40);
  out.beta = best.first;
  std::vector<double> x;
  const LinearFit f = fit_at(d, out.beta, prefactor, &x);
  out.r2 = f.slope;
  out.intercept = f.intercept;
  out.r_squared = f.r2;
  out.eps = d.eps;
  out.log_p = d.log_p;
  for (std::size_t i = 0; i < x.size(); ++i)
    out.fitted.push_back(f.intercept + f.slope * x[i] + prefactor * out.beta * d.log_eps[i]);
  const bool at_bound = out.beta < kSmallBallBetaMin + 0.02 || out.beta > kSmallBallBetaMax - 0.02;
  out.regime = (at_bound || !(out.r2 < 0.0)) ? "non-tauberian" : "tauberian";
  return out;
}

EllipticityReport ellipticity_scan(const Scenario& sc, const EllipticityProfile& profile,
                                   std::span<const HypothesisProbe> probes) {
  EllipticityReport r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& p : probes) {
    const double psi = profile.psi(p.mark.y);
    if (!(psi > 0.0)) fail(ErrorKind::Domain, fmt::format("ellipticity_scan: psi({:.6g}) = {:.3g} is not positive", p.mark.y, psi));
    double nx = 0.0;
    for (int k = 0; k < p.x.size(); ++k) nx += p.x[k] * p.x[k];
    // delta = 0 is read as no growth in |x| (the constant factor 1/2 would only rescale psi)
    const double bound = profile.delta == 0.0 ? psi : psi / (1.0 + std::pow(std::sqrt(nx), profile.delta));
    const JumpEval e = sc.eval_jump(p.s, p.x, p.mark);
    const double ratio = min_eigenvalue(e.gamma) / bound;
    if (ratio < r.min_ratio) {
      r.min_ratio = ratio;
      r.argmin = p;
    }
    ++r.probes;
  }
  r.margin = r.min_ratio - 1.0;
  r.pass = r.probes > 0 && r.min_ratio >= 1.0 - 1e-9;
  return r;
}

double pathwise_lower_bound_margin(const SMat<double>& gamma, double bound) {
  SMat<double> g = gamma;
  for (int i = 0; i < g.rows(); ++i) g(i, i) -= bound;
  return min_eigenvalue(g);
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotCheckable: return "not-checkable (analytic)";
  }
  return "?";
}

bool HypothesisReport::hard_failure() const {
  return std::any_of(items.begin(), items.end(), [](const CheckItem& c) { return c.hard && c.status == CheckStatus::Fail; });
}

namespace {

bool finite(const SMat<double>& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j))) return false;
  return true;
}

/// Relative mismatch between D_x c and central differences of c.
double jet_mismatch(const Scenario& sc, const HypothesisProbe& p) {
  const JumpEval e = sc.eval_jump(p.s, p.x, p.mark);
  double worst = 0.0;
  for (int k = 0; k < sc.dim(); ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(p.x[k]));
    SVec<double> xp = p.x, xm = p.x;
    xp[k] += h;
    xm[k] -= h;
    const SVec<double> cp = sc.eval_jump(p.s, xp, p.mark).c, cm = sc.eval_jump(p.s, xm, p.mark).c;
    for (int i = 0; i < sc.dim(); ++i) {
      const double fd = (cp[i] - cm[i]) / (2.0 * h);
      const double scale = std::max(1.0, std::abs(e.dxc(i, k)));
      worst = std::max(worst, std::abs(fd - e.dxc(i, k)) / scale);
    }
  }
  return worst;
}

}  // namespace

HypothesisReport hypothesis_report(const Scenario& sc, int budget, std::uint64_t seed) {
  HypothesisReport rep;
  rep.scenario = sc.name();
  const auto probes = sc.hypothesis_probes(budget, seed);

  {
    CheckItem it{"1.d", "I + D_x c invertible at sampled (s, x, u)", CheckStatus::Pass, true, ""};
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : probes) {
      const JumpEval e = sc.eval_jump(p.s, p.x, p.mark);
      const double det = std::abs(determinant(SMat<double>::identity(sc.dim()) + e.dxc));
      if (det < worst) {
        worst = det;
        if (det < 1e-12)
          it.detail = fmt::format("hypothesis 1.d fails: |det(I + D_x c)| = {:.3g} at s={:.4g}, u={:.6g}", det, p.s, p.mark.y);
      }
    }
    if (worst < 1e-12) {
      it.status = CheckStatus::Fail;
    } else {
      it.detail = fmt::format("min |det(I + D_x c)| = {:.4g} over {} probes", worst, probes.size());
    }
    rep.items.push_back(it);
  }
  {
    CheckItem it{"1.a-jets", "coefficient jets finite and consistent with finite differences", CheckStatus::Pass, true, ""};
    double worst = 0.0;
    bool ok = true;
    for (const auto& p : probes) {
      const JumpEval e = sc.eval_jump(p.s, p.x, p.mark);
      ok = ok && finite(e.dxc) && finite(e.gamma);
      worst = std::max(worst, jet_mismatch(sc, p));
    }
    it.detail = fmt::format("max relative mismatch {:.3g}", worst);
    if (!ok || worst > 1e-4) it.status = CheckStatus::Fail;
    rep.items.push_back(it);
  }
  {
    CheckItem it{"1.b-measure", "measure integrates min(1, y^2)", CheckStatus::Pass, true, ""};
    try {
      const double v = compensator_integral(sc.measure(), [](double y) { return std::min(1.0, y * y); }, 1.0);
      it.detail = fmt::format("integral = {:.6g}, mass = {:.6g}", v, total_mass(sc.measure()));
      if (!std::isfinite(v)) it.status = CheckStatus::Fail;
    } catch (const Error& e) {
      it.status = CheckStatus::Fail;
      it.detail = e.what();
    }
    rep.items.push_back(it);
  }
  {
    CheckItem it{"bottom-flux", "bottom generator boundary terms vanish", CheckStatus::Pass, false, ""};
    const double flux = sc.boundary_flux();
    it.detail = fmt::format("max |xi m| at support ends = {:.3g}", flux);
    if (flux > 1e-12) it.status = CheckStatus::Fail;
    rep.items.push_back(it);
  }
  {
    CheckItem it{"bottom-symmetry", "generator symmetry identity", CheckStatus::Pass, false, ""};
    const auto cases = sc.symmetry_cases();
    if (cases.empty()) {
      it.status = CheckStatus::NotCheckable;
      it.detail = "no Euclidean coordinate";
    } else {
      double worst = 0.0;
      for (const auto& c : cases) worst = std::max(worst, std::abs(generator_symmetry(c.coordinate, c.f, c.g).residual));
      it.detail = fmt::format("max residual {:.3g}", worst);
      if (worst > 1e-6) it.status = CheckStatus::Fail;
    }
    rep.items.push_back(it);
  }
  {
    CheckItem it{"ellipticity", "gamma[c] >= psi(u) / (1 + |x|^delta) I", CheckStatus::Pass, false, ""};
    if (auto prof = sc.ellipticity_profile()) {
      // the profile may vanish where the mark weight does (support ends); the
      // inequality is only informative where it is positive
      std::vector<HypothesisProbe> inner;
      for (const auto& p : probes)
        if (prof->psi(p.mark.y) > 0.0) inner.push_back(p);
      if (inner.empty()) {
        it.status = CheckStatus::Fail;
        it.detail = "profile vanishes at every probe";
      } else {
        const EllipticityReport e = ellipticity_scan(sc, *prof, inner);
        it.detail = fmt::format("min ratio {:.6g} (margin {:.3g}) over {} probes, {} with a vanishing profile skipped",
                                e.min_ratio, e.margin, inner.size(), probes.size() - inner.size());
        if (!e.pass) it.status = CheckStatus::Fail;
      }
    } else {
      it.status = CheckStatus::NotCheckable;
      it.detail = "no ellipticity profile declared";
    }
    rep.items.push_back(it);
  }
  rep.items.push_back({"R-Lp", "L^p bounds of the coefficients over the driver space", CheckStatus::NotCheckable, false,
                       "requires analytic bounds"});
  rep.items.push_back({"inverse-moments", "(det Gamma)^-1 in every L^p", CheckStatus::NotCheckable, false,
                       "analytic condition; evidence only: see inverse_moment in run reports"});
  return rep;
}

}  // namespace lp
