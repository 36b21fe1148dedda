#pragma once
/// Jump SDE description
///   X_t = x0 + int c(s, X_{s-}, u) N(ds,du)   [or the compensated measure]
///            + int sigma(s, X_{s-}) dZ_s,      Z in {t, Brownian}
/// together with the bottom structure acting on the marks.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lentparticle/bottom.hpp"
#include "lentparticle/jump_measure.hpp"
#include "lentparticle/prm.hpp"
#include "lentparticle/smallmat.hpp"

namespace lp {

enum class Driver { None, Time, Brownian };

const char* to_string(Driver d);

struct ResolvedMark {
  double y = 0.0;      // mark drawn from the measure
  double angle = 0.0;  // angular component, when the scenario has one
  SVec<double> v;      // differentiable mark coordinates
  BrownianIncrements nested;
  double variance = 0.0;  // variance of Gaussian mark coordinates, when used
};

template <class T>
using Tensor3 = std::array<SMat<T>, kMaxDim>;  // t[i](j,k)

template <class T>
struct JumpJets {
  SVec<T> c;
  SMat<T> dxc;
  Tensor3<T> d2xc;
  MarkJets<T> mark;
};

template <class T>
struct StepJets {
  SVec<T> drift;  // minus the compensator when compensated
  SMat<T> ddrift;
  Tensor3<T> d2drift;
  SVec<T> sigma;
  SMat<T> dsigma;
  Tensor3<T> d2sigma;
  SVec<T> gen_compensator;  // integral of a[c] against the measure (compensated case)
};

/// Double-precision evaluation of one jump at the pre-jump state.
struct JumpEval {
  SVec<double> c;
  SMat<double> dxc;
  SMat<double> gamma;
  bool second_order = false;  // d2xc and gen available
  Tensor3<double> d2xc;
  SVec<double> gen;
  bool has_mark_jets = false;
  MarkJets<double> mark;
  SMat<double> flat_coef;  // d x p
  bool has_nested = false;
  WienerEval nested;
  SMat<double> nested_outer;  // Jacobian of the outer map applied to the nested displacement
};

struct ScenarioInfo {
  std::string name;
  int dim = 1;
  int mark_dim = 1;     // number of differentiable mark coordinates
  int nested_dim = 0;   // Brownian dimension of nested marks (0: none)
  SVec<double> x0;
  double horizon = 1.0;
  LevyMeasureSpec measure;
  bool compensated = false;
  Driver driver = Driver::None;
  double euler_step = 0.0;   // default horizon / 1000
  double nested_step = 0.01;
  int jet_order = 1;
};

struct EllipticityProfile {
  std::function<double(double)> psi;  // lower bound shape in the mark
  double delta = 0.0;                 // growth exponent in |x|
};

struct HypothesisProbe {
  double s = 0.0;
  SVec<double> x;
  ResolvedMark mark;
};

class Scenario {
 public:
  explicit Scenario(ScenarioInfo info);
  virtual ~Scenario() = default;

  const ScenarioInfo& info() const { return info_; }
  const std::string& name() const { return info_.name; }
  int dim() const { return info_.dim; }
  int mark_dim() const { return info_.mark_dim; }
  double horizon() const { return info_.horizon; }
  const LevyMeasureSpec& measure() const { return info_.measure; }
  double euler_step() const;

  virtual ResolvedMark resolve_mark(const MarkedPoissonPath& path, std::size_t jump) const;

  /// Closed-form mark jets (needed for the generator and for IBP weights).
  virtual bool has_mark_jets() const { return false; }
  /// Order-2 information for second-order weights.
  virtual bool has_order2_jets() const { return false; }
  virtual JumpJets<double> jump_jets(double s, const SVec<double>& x, const ResolvedMark& m,
                                     const SVec<double>& v) const;
  virtual JumpJets<Taylor> jump_jets(double s, const SVec<Taylor>& x, const ResolvedMark& m,
                                     const SVec<Taylor>& v) const;
  virtual JumpEval eval_jump(double s, const SVec<double>& x, const ResolvedMark& m) const;

  virtual bool has_continuous_part() const { return false; }
  virtual StepJets<double> step_jets(double s, const SVec<double>& x) const;
  virtual StepJets<Taylor> step_jets(double s, const SVec<Taylor>& x) const;

  /// Euclidean bottom coordinates with a test pair for the symmetry identity.
  struct SymmetryCase {
    std::string label;
    BottomCoordinate coordinate;
    TestFunction f, g;
  };
  virtual std::vector<SymmetryCase> symmetry_cases() const { return {}; }
  /// Boundary flux xi * m at both support ends of each Euclidean coordinate
  /// (the generator formula is only valid when it vanishes).
  virtual double boundary_flux() const { return 0.0; }

  virtual std::optional<EllipticityProfile> ellipticity_profile() const { return std::nullopt; }
  /// Probe points (s, x, mark) for sampled hypothesis checks.
  virtual std::vector<HypothesisProbe> hypothesis_probes(int budget, std::uint64_t seed) const;

 protected:
  ScenarioInfo info_;
};

template <class T>
StepJets<T> zero_step_jets(int d) {
  StepJets<T> z;
  z.drift = SVec<T>(d);
  z.ddrift = SMat<T>(d, d);
  z.sigma = SVec<T>(d);
  z.dsigma = SMat<T>(d, d);
  z.gen_compensator = SVec<T>(d);
  for (int i = 0; i < d; ++i) {
    z.d2drift[i] = SMat<T>(d, d);
    z.d2sigma[i] = SMat<T>(d, d);
  }
  return z;
}

/// Implements the double and Taylor overloads from member templates
/// `jets_t<T>` and (optionally) `steps_t<T>` of the derived class.
template <class Derived>
class TemplatedScenario : public Scenario {
 public:
  using Scenario::Scenario;

  bool has_mark_jets() const override { return true; }

  JumpJets<double> jump_jets(double s, const SVec<double>& x, const ResolvedMark& m,
                             const SVec<double>& v) const override {
    return static_cast<const Derived*>(this)->template jets_t<double>(s, x, m, v);
  }
  JumpJets<Taylor> jump_jets(double s, const SVec<Taylor>& x, const ResolvedMark& m,
                             const SVec<Taylor>& v) const override {
    return static_cast<const Derived*>(this)->template jets_t<Taylor>(s, x, m, v);
  }
  StepJets<double> step_jets(double s, const SVec<double>& x) const override {
    return static_cast<const Derived*>(this)->template steps_t<double>(s, x);
  }
  StepJets<Taylor> step_jets(double s, const SVec<Taylor>& x) const override {
    return static_cast<const Derived*>(this)->template steps_t<Taylor>(s, x);
  }

  template <class T>
  StepJets<T> steps_t(double, const SVec<T>& x) const {
    return zero_step_jets<T>(x.size());
  }
};

template <class T>
Tensor3<T> zero_tensor(int d) {
  Tensor3<T> t;
  for (int i = 0; i < d; ++i) t[i] = SMat<T>(d, d);
  return t;
}

/// sum_jk t[i](j,k) g(j,k) for each i
template <class T>
SVec<T> contract(const Tensor3<T>& t, const SMat<T>& g, int d) {
  SVec<T> out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) out[i] += t[i](j, k) * g(j, k);
  return out;
}

/// JumpEval from closed-form jets.
JumpEval jump_eval_from_jets(const JumpJets<double>& j, bool second_order);

}  // namespace lp
