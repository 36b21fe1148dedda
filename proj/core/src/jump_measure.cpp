#include "lentparticle/jump_measure.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "lentparticle/error.hpp"
#include "lentparticle/quadrature.hpp"
#include "lentparticle/stats.hpp"

namespace lp {

LevyMeasureSpec LevyMeasureSpec::power_law(double epsilon, double upper, double truncation, double scale) {
  LevyMeasureSpec s;
  s.family = MeasureFamily::PowerLaw;
  s.epsilon = epsilon;
  s.lower = 0.0;
  s.upper = upper;
  s.truncation = truncation;
  s.scale = scale;
  s.validate();
  return s;
}

LevyMeasureSpec LevyMeasureSpec::uniform(double lower, double upper, double density, double truncation) {
  LevyMeasureSpec s;
  s.family = MeasureFamily::Uniform;
  s.lower = lower;
  s.upper = upper;
  s.scale = density;
  s.truncation = truncation;
  s.validate();
  return s;
}

LevyMeasureSpec LevyMeasureSpec::tabulated(std::vector<double> grid, std::vector<double> density, double truncation) {
  LevyMeasureSpec s;
  s.family = MeasureFamily::Tabulated;
  s.lower = grid.empty() ? 0.0 : grid.front();
  s.upper = grid.empty() ? 0.0 : grid.back();
  s.grid = std::move(grid);
  s.density = std::move(density);
  s.truncation = truncation;
  s.validate();
  return s;
}

void LevyMeasureSpec::validate() const {
  if (!(truncation >= 0.0)) fail(ErrorKind::Domain, "measure: truncation must be >= 0");
  if (!(scale >= 0.0)) fail(ErrorKind::Domain, "measure: density scale must be >= 0");
  switch (family) {
    case MeasureFamily::PowerLaw:
      if (!(upper > 0.0)) fail(ErrorKind::Domain, "measure: power-law upper bound must be > 0");
      if (std::isinf(upper) && !(epsilon > 0.0))
        fail(ErrorKind::Domain, "measure: unbounded power-law support needs epsilon > 0");
      if (!std::isfinite(epsilon)) fail(ErrorKind::Domain, "measure: epsilon must be finite");
      break;
    case MeasureFamily::Uniform:
      if (!(upper > lower) || !std::isfinite(upper) || !std::isfinite(lower))
        fail(ErrorKind::Domain, "measure: uniform support must be a finite interval");
      break;
    case MeasureFamily::Tabulated:
      if (grid.size() < 2 || grid.size() != density.size())
        fail(ErrorKind::Domain, "measure: tabulated density needs >= 2 matching grid/density points");
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) fail(ErrorKind::Domain, "measure: tabulated grid must increase");
      for (double d : density)
        if (!(d >= 0.0)) fail(ErrorKind::Domain, "measure: tabulated density must be nonnegative");
      break;
  }
}

double LevyMeasureSpec::lo() const { return std::max(lower, truncation); }
double LevyMeasureSpec::hi() const { return upper; }

bool LevyMeasureSpec::infinite_activity() const {
  return family == MeasureFamily::PowerLaw && epsilon >= 0.0;
}

double LevyMeasureSpec::pdf(double y) const {
  if (!(y > lo() || (y == lo() && family != MeasureFamily::PowerLaw)) || y > hi()) return 0.0;
  switch (family) {
    case MeasureFamily::PowerLaw: return scale * std::pow(y, -1.0 - epsilon);
    case MeasureFamily::Uniform: return scale;
    case MeasureFamily::Tabulated: {
      auto it = std::upper_bound(grid.begin(), grid.end(), y);
      if (it == grid.end()) return density.back();
      const auto i = static_cast<std::size_t>(it - grid.begin()) - 1;
      const double f = (y - grid[i]) / (grid[i + 1] - grid[i]);
      return density[i] + f * (density[i + 1] - density[i]);
    }
  }
  return 0.0;
}

double LevyMeasureSpec::log_pdf_derivative(double y) const {
  switch (family) {
    case MeasureFamily::PowerLaw: return -(1.0 + epsilon) / y;
    case MeasureFamily::Uniform: return 0.0;
    case MeasureFamily::Tabulated: {
      auto it = std::upper_bound(grid.begin(), grid.end(), y);
      if (it == grid.end() || it == grid.begin()) fail(ErrorKind::Domain, "log-density derivative outside support");
      const auto i = static_cast<std::size_t>(it - grid.begin()) - 1;
      const double slope = (density[i + 1] - density[i]) / (grid[i + 1] - grid[i]);
      const double p = pdf(y);
      if (!(p > 0.0)) fail(ErrorKind::Domain, "log-density derivative where density vanishes");
      return slope / p;
    }
  }
  return 0.0;
}

std::string describe(const LevyMeasureSpec& s) {
  switch (s.family) {
    case MeasureFamily::PowerLaw:
      return fmt::format("power-law y^(-1-{}) on ({}, {}], truncation {}", s.epsilon, s.lower, s.upper, s.truncation);
    case MeasureFamily::Uniform:
      return fmt::format("uniform density {} on [{}, {}], truncation {}", s.scale, s.lower, s.upper, s.truncation);
    case MeasureFamily::Tabulated:
      return fmt::format("tabulated density on [{}, {}] ({} nodes), truncation {}", s.lower, s.upper, s.grid.size(),
                         s.truncation);
  }
  return "unknown";
}

namespace {

// integral of y^(-1-eps) over (a, b]
double power_integral(double eps, double a, double b) {
  if (eps == 0.0) return std::log(b / a);
  const double tb = std::isinf(b) ? 0.0 : std::pow(b, -eps);
  return (std::pow(a, -eps) - tb) / eps;
}

// tabulated: mass of segment i between its left end and y
double tab_partial(const LevyMeasureSpec& s, std::size_t i, double y) {
  const double x0 = s.grid[i], x1 = s.grid[i + 1];
  const double d0 = s.density[i], d1 = s.density[i + 1];
  const double slope = (d1 - d0) / (x1 - x0);
  const double u = y - x0;
  return d0 * u + 0.5 * slope * u * u;
}

double tab_mass_above(const LevyMeasureSpec& s, double t) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < s.grid.size(); ++i) {
    const double a = std::max(s.grid[i], t);
    const double b = s.grid[i + 1];
    if (b <= a) continue;
    m += tab_partial(s, i, b) - tab_partial(s, i, a);
  }
  return m;
}

}  // namespace

double total_mass(const LevyMeasureSpec& s) {
  s.validate();
  const double a = s.lo(), b = s.hi();
  if (a >= b) return 0.0;
  switch (s.family) {
    case MeasureFamily::PowerLaw:
      if (a == 0.0 && s.epsilon >= 0.0)
        fail(ErrorKind::Domain, "total_mass: infinite mass (power law with zero truncation)");
      return s.scale * power_integral(s.epsilon, a, b);
    case MeasureFamily::Uniform: return s.scale * (b - a);
    case MeasureFamily::Tabulated: return tab_mass_above(s, a);
  }
  return 0.0;
}

double mark_cdf(const LevyMeasureSpec& s, double y) {
  const double m = total_mass(s);
  if (!(m > 0.0)) fail(ErrorKind::Domain, "mark_cdf: zero mass");
  const double a = s.lo(), b = s.hi();
  if (y <= a) return 0.0;
  if (y >= b) return 1.0;
  switch (s.family) {
    case MeasureFamily::PowerLaw: return s.scale * power_integral(s.epsilon, a, y) / m;
    case MeasureFamily::Uniform: return s.scale * (y - a) / m;
    case MeasureFamily::Tabulated: return (m - tab_mass_above(s, y)) / m;
  }
  return 0.0;
}

MarkQuantile::MarkQuantile(const LevyMeasureSpec& s) : spec_(s), a_(s.lo()), b_(s.hi()) {
  // the closed-form families only need a nonempty support; skip the mass integral
  const bool closed = s.family != MeasureFamily::Tabulated && s.scale > 0.0 && a_ < b_;
  mass_ = closed ? 1.0 : total_mass(s);
  if (!(mass_ > 0.0)) fail(ErrorKind::Domain, "sample_mark: zero mass");
  if (s.family == MeasureFamily::PowerLaw && s.epsilon != 0.0) {
    ta_ = std::pow(a_, -s.epsilon);
    tb_ = std::isinf(b_) ? 0.0 : std::pow(b_, -s.epsilon);
  }
}

double sample_mark(const LevyMeasureSpec& s, RngStream& rng) { return MarkQuantile(s)(rng.uniform()); }

double MarkQuantile::operator()(double u) const {
  const LevyMeasureSpec& s = spec_;
  const double a = a_, b = b_;
  switch (s.family) {
    case MeasureFamily::PowerLaw: {
      const double e = s.epsilon;
      if (e == 0.0) return a * std::pow(b / a, u);
      // solve integral_a^y = u * integral_a^b
      const double y = std::pow(ta_ - u * (ta_ - tb_), -1.0 / e);
      return std::clamp(y, a, b);
    }
    case MeasureFamily::Uniform: return a + u * (b - a);
    case MeasureFamily::Tabulated: {
      double target = u * mass_;
      for (std::size_t i = 0; i + 1 < s.grid.size(); ++i) {
        const double lo = std::max(s.grid[i], a);
        const double hi = s.grid[i + 1];
        if (hi <= lo) continue;
        const double seg = tab_partial(s, i, hi) - tab_partial(s, i, lo);
        if (target > seg && i + 2 < s.grid.size()) {
          target -= seg;
          continue;
        }
        // invert d0 u + slope u^2 / 2 = target + partial(lo)
        const double x0 = s.grid[i];
        const double d0 = s.density[i];
        const double slope = (s.density[i + 1] - d0) / (s.grid[i + 1] - x0);
        const double c = target + tab_partial(s, i, lo);
        double du;
        if (std::abs(slope) < 1e-14 * std::max(1.0, d0)) du = c / d0;
        else du = (-d0 + std::sqrt(std::max(0.0, d0 * d0 + 2.0 * slope * c))) / slope;
        return std::clamp(x0 + du, lo, hi);
      }
      return b;
    }
  }
  return a;
}

namespace {

QuadResult measure_integral(const LevyMeasureSpec& s, const std::function<double(double)>& g) {
  const double a = s.lo(), b = s.hi();
  if (a >= b) return {0.0, 0.0, 0, true};
  auto integrand = [&](double y) { return g(y) * s.pdf(y); };
  QuadOptions opt;
  if (s.family == MeasureFamily::Tabulated) {
    // integrate node to node so kinks of the density never sit inside a piece
    QuadResult total{0.0, 0.0, 0, true};
    opt.max_splits = 0;
    for (std::size_t i = 0; i + 1 < s.grid.size(); ++i) {
      const double lo = std::max(s.grid[i], a), hi = s.grid[i + 1];
      if (hi <= lo) continue;
      const QuadResult r = integrate(integrand, lo, hi, opt);
      total.value += r.value;
      total.error += r.error;
      total.pieces += r.pieces;
    }
    return total;
  }
  if (std::isinf(b)) {
    // finite head with singular splitting, then the tail
    const double mid = std::max(1.0, 2.0 * a);
    QuadResult head = integrate(integrand, a, mid, opt);
    const QuadResult tail = integrate(integrand, mid, b, opt);
    head.value += tail.value;
    head.error += tail.error;
    head.converged = head.converged && tail.converged;
    return head;
  }
  return integrate(integrand, a, b, opt);
}

}  // namespace

std::vector<double> compensator_integral(const LevyMeasureSpec& s, const MarkFunction& f, double t) {
  s.validate();
  const double probe = s.lo() < s.hi() ? 0.5 * (s.lo() + std::min(s.hi(), s.lo() + 1.0)) : s.lo();
  const std::size_t dim = f(probe).size();
  std::vector<double> out(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const QuadResult r = measure_integral(s, [&](double y) { return f(y)[i]; });
    if (!r.converged || !std::isfinite(r.value))
      fail(ErrorKind::Domain, fmt::format("compensator_integral: component {} is not integrable against the measure", i));
    out[i] = t * r.value;
  }
  return out;
}

double compensator_integral(const LevyMeasureSpec& s, const std::function<double(double)>& f, double t) {
  return compensator_integral(s, [&](double y) { return std::vector<double>{f(y)}; }, t)[0];
}

double laplace_exponent(double lambda, const std::function<double(double)>& psi, const LevyMeasureSpec& s) {
  if (!(lambda >= 0.0)) fail(ErrorKind::Domain, "laplace_exponent: lambda must be >= 0");
  if (lambda == 0.0) return 0.0;
  // probe psi >= 0 on a log grid over the support
  const double a = s.lo(), b = s.hi();
  const double pa = a > 0 ? a : std::min(1e-12, 0.5 * b);
  const double pb = std::isinf(b) ? std::max(1e6, 10.0 * pa) : b;
  for (int k = 0; k <= 64; ++k) {
    const double y = pa * std::pow(pb / pa, k / 64.0);
    if (psi(y) < 0.0) fail(ErrorKind::Domain, fmt::format("laplace_exponent: psi negative at y = {}", y));
  }
  const QuadResult r = measure_integral(s, [&](double y) { return std::expm1(-lambda * psi(y)); });
  if (!std::isfinite(r.value)) fail(ErrorKind::Numeric, "laplace_exponent: integral diverged");
  return std::min(0.0, r.value);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0 && hi > lo && n >= 2)) fail(ErrorKind::Domain, "log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

SmallBallParams small_ball_params(double alpha, double r1, double t) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Domain, "small_ball_params: alpha must lie in (0,1)");
  if (!(r1 < 0.0)) fail(ErrorKind::Domain, "small_ball_params: r1 must be negative");
  if (!(t > 0.0)) fail(ErrorKind::Domain, "small_ball_params: horizon must be positive");
  SmallBallParams p;
  p.beta = alpha / (1.0 - alpha);
  // |alpha t r1|^(1/alpha) = |beta t r2|^(1/beta)
  const double lhs = std::pow(std::abs(alpha * t * r1), 1.0 / alpha);
  p.r2 = -std::pow(lhs, p.beta) / (p.beta * t);
  return p;
}

TauberianFit tauberian_fit_values(const std::vector<double>& lambdas, const std::vector<double>& values, double t) {
  if (lambdas.size() != values.size() || lambdas.size() < 4)
    fail(ErrorKind::Domain, "tauberian_fit: need at least 4 grid points");
  const double span = std::log10(lambdas.back() / lambdas.front());
  if (!(span >= 3.0 - 1e-9)) fail(ErrorKind::Domain, "tauberian_fit: lambda grid must span at least 3 decades");
  TauberianFit fit;
  fit.lambdas = lambdas;
  fit.values = values;
  fit.horizon = t;
  const std::size_t start = lambdas.size() / 2;
  std::vector<double> lx, ly;
  for (std::size_t i = start; i < lambdas.size(); ++i) {
    if (!(values[i] < 0.0)) continue;
    lx.push_back(std::log(lambdas[i]));
    ly.push_back(std::log(-values[i]));
  }
  if (lx.size() < 2) {
    fit.regime = "non-tauberian";
    return fit;
  }
  const LinearFit lf = linear_fit(lx, ly);
  fit.alpha = lf.slope;
  fit.r1 = -std::exp(lf.intercept);
  fit.r2_fit_residual = lf.rss;
  fit.r_squared = lf.r2;
  if (std::abs(fit.alpha) < 0.02) {
    fit.regime = "mass-dominated";
  } else if (fit.alpha <= 0.0 || fit.alpha >= 1.0) {
    fit.regime = "non-tauberian";
  } else {
    fit.regime = "tauberian";
    fit.ok = true;
    const SmallBallParams p = small_ball_params(fit.alpha, fit.r1, t);
    fit.beta = p.beta;
    fit.r2 = p.r2;
  }
  return fit;
}

TauberianFit tauberian_fit(const std::function<double(double)>& psi, const LevyMeasureSpec& spec,
                           const std::vector<double>& lambda_grid, double t) {
  std::vector<double> vals(lambda_grid.size());
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) vals[i] = laplace_exponent(lambda_grid[i], psi, spec);
  return tauberian_fit_values(lambda_grid, vals, t);
}

}  // namespace lp
