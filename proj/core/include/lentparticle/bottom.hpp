#pragma once
/// Bottom (mark-space) Dirichlet structures: carre du champ gamma, generator a
/// and gradient samples, for Euclidean mark coordinates and for Brownian marks
/// under the Ornstein-Uhlenbeck structure.

#include <functional>
#include <span>
#include <vector>

#include "lentparticle/prm.hpp"
#include "lentparticle/smallmat.hpp"
#include "lentparticle/taylor.hpp"

namespace lp {

/// xi(u) = scale * u^power * (u - lo)^taper_lo * (hi - u)^taper_hi
/// The taper exponents make xi vanish at the support ends.
struct EuclideanWeight {
  double scale = 1.0;
  double power = 0.0;
  double taper_lo = 0.0;
  double taper_hi = 0.0;
  double lo = 0.0;
  double hi = 1.0;

  static EuclideanWeight constant(double c) { return {c, 0.0, 0.0, 0.0, 0.0, 1.0}; }

  template <class T>
  T operator()(const T& u) const {
    T r = T(scale) * ipow(u, power);
    if (taper_lo != 0.0) r = r * ipow(u - T(lo), taper_lo);
    if (taper_hi != 0.0) r = r * ipow(T(hi) - u, taper_hi);
    return r;
  }

  template <class T>
  T derivative(const T& u) const {
    // product rule over the three factors
    const T f1 = ipow(u, power);
    const T g1 = power == 0.0 ? T(0.0) : T(power) * ipow(u, power - 1.0);
    const T f2 = taper_lo == 0.0 ? T(1.0) : ipow(u - T(lo), taper_lo);
    const T g2 = taper_lo == 0.0 ? T(0.0) : T(taper_lo) * ipow(u - T(lo), taper_lo - 1.0);
    const T f3 = taper_hi == 0.0 ? T(1.0) : ipow(T(hi) - u, taper_hi);
    const T g3 = taper_hi == 0.0 ? T(0.0) : T(-taper_hi) * ipow(T(hi) - u, taper_hi - 1.0);
    return T(scale) * (g1 * f2 * f3 + f1 * g2 * f3 + f1 * f2 * g3);
  }

  bool vanishes_at_ends() const { return taper_lo > 0.0 && taper_hi > 0.0; }
};

/// First and second mark derivatives of a coefficient c: R^p -> R^d, plus
/// the bottom data of each mark coordinate (weight, its derivative and the
/// log-density derivative of the mark law).
template <class T>
struct MarkJets {
  SMat<T> dvc;   // d x p
  SMat<T> d2vc;  // d x p, pure second derivatives d^2 c / dv_k^2
  SVec<T> xi;    // p
  SVec<T> dxi;   // p
  SVec<T> score; // p
};

/// gamma[c_i, c_j] = sum_k xi_k d_k c_i d_k c_j
template <class T>
SMat<T> euclidean_gamma(const MarkJets<T>& j) {
  const int d = j.dvc.rows(), p = j.dvc.cols();
  SMat<T> g(d, d);
  for (int k = 0; k < p; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) g(a, b) += j.xi[k] * j.dvc(a, k) * j.dvc(b, k);
  return g;
}

/// a[c_i] = sum_k 1/2 xi_k d_k^2 c_i + 1/2 (xi_k' + xi_k m_k'/m_k) d_k c_i
template <class T>
SVec<T> euclidean_generator(const MarkJets<T>& j) {
  const int d = j.dvc.rows(), p = j.dvc.cols();
  SVec<T> a(d);
  for (int k = 0; k < p; ++k) {
    const T drift = T(0.5) * (j.dxi[k] + j.xi[k] * j.score[k]);
    for (int i = 0; i < d; ++i) a[i] += T(0.5) * j.xi[k] * j.d2vc(i, k) + drift * j.dvc(i, k);
  }
  return a;
}

/// Coefficients of the gradient sample: column k is sqrt(xi_k) d_k c, so that
/// c^flat = sum_k column_k * G_k with G_k drawn from rho.
SMat<double> flat_coefficients(const MarkJets<double>& j);
SVec<double> flat_sample_euclidean(const MarkJets<double>& j, std::span<const double> rho);
SVec<double> flat_sample_euclidean(const MarkJets<double>& j, RngStream& stream, RhoBasis basis = RhoBasis::Gaussian);

/// One Euclidean mark coordinate: weight, mark density (up to a constant) and
/// its log-derivative, on [lo, hi] (either end may be infinite).
struct BottomCoordinate {
  std::function<double(double)> xi;
  std::function<double(double)> dxi;
  std::function<double(double)> density;
  std::function<double(double)> score;
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
};

/// a[f](u) for a scalar f with derivatives f1 = f', f2 = f''.
double euclidean_generator_scalar(const BottomCoordinate& b, double u, double f1, double f2);

struct TestFunction {
  std::function<double(double)> f, df, d2f;
};

/// integral a[f] g dnu + 1/2 integral gamma[f,g] dnu, which vanishes when the
/// generator is the symmetric one and boundary terms vanish.
struct SymmetryCheck {
  double lhs = 0.0;  // integral a[f] g dnu
  double rhs = 0.0;  // -1/2 integral gamma[f,g] dnu
  double residual = 0.0;
};
SymmetryCheck generator_symmetry(const BottomCoordinate& b, const TestFunction& f, const TestFunction& g);

/// Nested diffusion zeta^x_t = x + int a(zeta) dB + int b(zeta) ds, d-dimensional
/// state driven by a q-dimensional Brownian mark.
struct WienerOUBottom {
  int d = 1;
  int q = 1;
  std::function<SMat<double>(const SVec<double>&)> a;                 // d x q
  std::function<std::vector<SMat<double>>(const SVec<double>&)> da;   // q matrices d x d: Jacobian of column j
  std::function<SVec<double>(const SVec<double>&)> b;                 // d
  std::function<SMat<double>(const SVec<double>&)> db;                // d x d
  /// optional: derivative of the drift with respect to an external parameter
  std::function<SVec<double>(const SVec<double>&)> b_param;
  double overflow_limit = 1e12;
};

struct WienerEval {
  SVec<double> displacement;  // zeta_y - x
  SMat<double> gamma_m;       // carre du champ of zeta_y under the OU structure
  SMat<double> m;             // d zeta_y / d x
  SMat<double> m_inv;         // solution of the inverse SDE
  SVec<double> param_tangent; // d zeta_y / d parameter (when b_param is set)
  double inverse_defect = 0.0;  // max over steps of |M M^-1 - I|
  /// flat_steps[k] = M_y M_{k+1}^{-1} a(zeta_k): c^flat = sum_k flat_steps[k] dW'_k
  std::vector<SMat<double>> flat_steps;
  std::vector<double> dt;
};

/// Euler-Maruyama for zeta, M and M^{-1} on one Brownian draw.
WienerEval wiener_ou_eval(const WienerOUBottom& bottom, const SVec<double>& x, const BrownianIncrements& dw,
                          bool keep_flat_steps = false);

/// Gradient sample of zeta_y given an independent Brownian path of the same grid.
SVec<double> wiener_flat_sample(const WienerEval& ev, RngStream& rho_stream);

/// F' gamma F'^T for an outer map with Jacobian F'.
SMat<double> push_forward_gamma(const SMat<double>& jacobian, const SMat<double>& gamma);

}  // namespace lp
