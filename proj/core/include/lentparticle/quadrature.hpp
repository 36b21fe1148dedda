#pragma once
/// Adaptive Gauss-Kronrod integration with dyadic splitting toward the lower
/// endpoint, for integrands with an integrable singularity there.

#include <functional>

namespace lp {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int pieces = 0;
  bool converged = false;
};

struct QuadOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-12;
  int max_depth = 18;
  /// Split [a,b] at a + (b-a) 2^-k, k = 1..max_splits, so that each piece sees
  /// a bounded singularity ratio. Set to 0 for smooth integrands.
  int max_splits = 60;
};

using Integrand = std::function<double(double)>;

/// Integral over [a,b]. b may be +infinity (a must then be finite);
/// both may be infinite.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt = {});

}  // namespace lp
