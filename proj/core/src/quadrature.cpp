#include "lentparticle/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lentparticle/error.hpp"

namespace lp {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

QuadResult gk_piece(const Integrand& f, double a, double b, const QuadOptions& opt) {
  double err = 0.0;
  double l1 = 0.0;
  double v = 0.0;
  if (std::isinf(a) || std::isinf(b)) {
    v = GK::integrate(f, a, b, static_cast<unsigned>(opt.max_depth), opt.rel_tol, &err, &l1);
  } else {
    // Map to [-1, 1] ourselves: the library's recursion compares an unscaled
    // error estimate with a scaled tolerance, which never settles on short pieces.
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const auto g = [&](double t) { return half * f(mid + half * t); };
    v = GK::integrate(g, -1.0, 1.0, static_cast<unsigned>(opt.max_depth), opt.rel_tol, &err, &l1);
  }
  if (!std::isfinite(v)) fail(ErrorKind::Numeric, "quadrature: non-finite integral");
  return {v, err, 1, true};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt) {
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    QuadResult r = integrate(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  if (std::isinf(b) && !std::isinf(a) && opt.max_splits > 0) {
    // y = m / t maps [m, inf) onto (0, 1]; a power-law tail becomes an
    // integrable singularity at t = 0, which the dyadic splitting handles
    const double m = std::max(1.0, a);
    QuadResult head = a < m ? integrate(f, a, m, opt) : QuadResult{0.0, 0.0, 0, true};
    const auto g = [&](double t) {
      const double y = m / t;
      const double v = std::isinf(y) ? 0.0 : f(y);
      return v == 0.0 ? 0.0 : v * (y / t);
    };
    const QuadResult tail = integrate(g, 0.0, 1.0, opt);
    head.value += tail.value;
    head.error += tail.error;
    head.pieces += tail.pieces;
    head.converged = head.converged && tail.converged;
    return head;
  }
  if (std::isinf(a) || std::isinf(b) || opt.max_splits <= 0) return gk_piece(f, a, b, opt);

  // Dyadic pieces [a + w 2^-(k+1), a + w 2^-k]; stop once the remaining
  // sliver cannot matter at the requested absolute tolerance.
  QuadResult out;
  const double w = b - a;
  double hi = b;
  for (int k = 1; k <= opt.max_splits; ++k) {
    const double lo = a + w * std::ldexp(1.0, -k);
    // pieces much narrower than |a| only lose digits in the node positions
    if (a != 0.0 && hi - lo < 1e-6 * std::abs(a)) break;
    const QuadResult p = gk_piece(f, lo, hi, opt);
    out.value += p.value;
    out.error += p.error;
    out.pieces += 1;
    hi = lo;
    const double floor = std::max(0.25 * opt.abs_tol, 1e-15 * std::abs(out.value));
    if (k > 4 && std::abs(p.value) < floor && p.error < floor) {
      // geometric tail of an integrable singularity: next pieces are smaller
      const QuadResult rest = gk_piece(f, a, hi, opt);
      out.value += rest.value;
      out.error += rest.error;
      out.pieces += 1;
      out.converged = true;
      return out;
    }
  }
  const QuadResult rest = gk_piece(f, a, hi, opt);
  out.value += rest.value;
  out.error += rest.error;
  out.pieces += 1;
  // splitting stopped early: trust only if the last sliver is negligible
  out.converged = std::abs(rest.value) < std::max(1e3 * opt.abs_tol, 1e-12 * std::abs(out.value));
  return out;
}

}  // namespace lp
