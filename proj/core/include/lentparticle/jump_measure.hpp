#pragma once
/// Jump intensity measures: mass, sampling, compensators, Laplace exponents
/// and the small-ball (Tauberian) exponents derived from them.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lentparticle/rng.hpp"

namespace lp {

enum class MeasureFamily { PowerLaw, Uniform, Tabulated };

/// The measure restricted to (truncation, upper] intersected with its support.
///  - PowerLaw:  scale * y^(-1-epsilon) dy on (lower, upper], lower >= 0; upper may be +inf when epsilon > 0
///  - Uniform:   constant density `scale` on [lower, upper]
///  - Tabulated: piecewise-linear density through (grid[i], density[i])
struct LevyMeasureSpec {
  MeasureFamily family = MeasureFamily::PowerLaw;
  double epsilon = 0.5;
  double lower = 0.0;
  double upper = 1.0;
  double scale = 1.0;
  double truncation = 0.0;
  std::vector<double> grid;
  std::vector<double> density;

  static LevyMeasureSpec power_law(double epsilon, double upper, double truncation, double scale = 1.0);
  static LevyMeasureSpec uniform(double lower, double upper, double density = 1.0, double truncation = 0.0);
  static LevyMeasureSpec tabulated(std::vector<double> grid, std::vector<double> density, double truncation = 0.0);

  /// Effective integration range after truncation.
  double lo() const;
  double hi() const;
  /// Density with respect to Lebesgue measure (0 outside the effective range).
  double pdf(double y) const;
  /// d/dy log pdf on the open support.
  double log_pdf_derivative(double y) const;
  /// True when the untruncated measure has infinite mass near its lower end.
  bool infinite_activity() const;
  void validate() const;
};

std::string describe(const LevyMeasureSpec& spec);

double total_mass(const LevyMeasureSpec& spec);
/// Normalised CDF of the truncated measure (built-in families).
double mark_cdf(const LevyMeasureSpec& spec, double y);
double sample_mark(const LevyMeasureSpec& spec, RngStream& stream);

/// Inverse CDF of the normalised measure with the support constants computed
/// once. Keeps a reference to the measure description.
class MarkQuantile {
 public:
  explicit MarkQuantile(const LevyMeasureSpec& spec);
  double operator()(double u) const;

 private:
  const LevyMeasureSpec& spec_;
  double a_ = 0.0, b_ = 0.0, mass_ = 0.0;
  double ta_ = 0.0, tb_ = 0.0;  // power law: a^-eps, b^-eps
};

using MarkFunction = std::function<std::vector<double>(double)>;

/// t * integral of f against the truncated measure.
std::vector<double> compensator_integral(const LevyMeasureSpec& spec, const MarkFunction& f, double t);
double compensator_integral(const LevyMeasureSpec& spec, const std::function<double(double)>& f, double t);

/// integral of (exp(-lambda psi(y)) - 1) over the truncated measure.
double laplace_exponent(double lambda, const std::function<double(double)>& psi, const LevyMeasureSpec& spec);

struct TauberianFit {
  double alpha = 0.0;
  double r1 = 0.0;
  double beta = 0.0;
  double r2 = 0.0;
  double horizon = 1.0;
  double r2_fit_residual = 0.0;  // residual sum of squares of the log-log fit
  double r_squared = 0.0;
  std::string regime;  // "tauberian", "mass-dominated" or "non-tauberian"
  bool ok = false;
  std::vector<double> lambdas;
  std::vector<double> values;  // L(lambda) on the full grid
};

/// Log-log regression of |L(lambda)| on the upper half of the grid.
/// beta and r2 are filled through small_ball_params when the fit succeeds.
TauberianFit tauberian_fit(const std::function<double(double)>& psi, const LevyMeasureSpec& spec,
                           const std::vector<double>& lambda_grid, double horizon = 1.0);
/// Same regression on given (lambda, L) pairs.
TauberianFit tauberian_fit_values(const std::vector<double>& lambdas, const std::vector<double>& values,
                                  double horizon = 1.0);

struct SmallBallParams {
  double beta = 0.0;
  double r2 = 0.0;
};

SmallBallParams small_ball_params(double alpha, double r1, double horizon);

std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace lp
