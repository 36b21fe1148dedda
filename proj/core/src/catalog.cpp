#include "lentparticle/catalog.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <fmt/format.h>

#include "lentparticle/error.hpp"

namespace lp {

namespace {

std::vector<ParamSpec> measure_params(double horizon) {
  return {
      {"horizon", horizon, 0.0, 100.0, true, false, false, "time horizon T"},
      {"epsilon", 0.5, 0.0, 1.0, false, true, false,
       "power-law exponent, tau(dy) = y^(-1-epsilon) dy; must be < 1 for the Tauberian regime"},
      {"truncation", 0.01, 0.0, 1.0, true, true, false, "small-jump truncation (marks below are dropped)"},
      {"y_max", 1.0, 0.0, 100.0, true, false, false, "upper end of the mark support"},
      {"h", 0.0, 0.0, 1.0, false, false, false, "Euler step between jumps (0: horizon / 1000)"},
  };
}

std::vector<ParamSpec> weight_params() {
  return {
      {"xi_scale", 1.0, 0.0, 100.0, true, false, false, "mark weight scale"},
      {"xi_power", 1.0, 0.0, 4.0, false, false, false, "mark weight power of u"},
      {"xi_taper_lo", 1.0, 0.0, 4.0, false, false, false, "power of (u - truncation) in the mark weight"},
      {"xi_taper_hi", 2.0, 0.0, 4.0, false, false, false, "power of (y_max - u) in the mark weight"},
  };
}

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;
  c.push_back({"compound", "X_T = x0 + sum of marks, Euclidean mark weight", 1, {0.0}, 2, false, true, false,
               concat(measure_params(0.5), weight_params())});
  c.push_back({"compound-linear", "c = beta x u, optional sigma1 x dZ", 1, {1.0}, 2, true, true, false,
               concat(concat(measure_params(0.5), weight_params()),
                      {{"beta", 0.5, -10.0, 10.0, false, false, false, "jump gain"},
                       {"sigma1", 0.0, -5.0, 5.0, false, false, false, "continuous coefficient sigma1 x"}})});
  c.push_back({"simple2d", "c = (B_y, B_y^2 / 2) with a Brownian mark", 2, {0.0, 0.0}, 2, false, false, false,
               measure_params(1.0)});
  c.push_back({"subordination-linear", "c = zeta^x_y - x for dzeta = sigma0 dB - kappa (zeta - theta) dt", 2,
               {0.0, 0.0}, 2, false, false, false,
               concat(measure_params(1.0),
                      {{"dim", 2.0, 1.0, 4.0, false, false, true, "state dimension"},
                       {"sigma0", 1.0, 0.0, 10.0, true, false, false, "diffusion scale"},
                       {"kappa", 0.0, 0.0, 50.0, false, false, false, "mean reversion (0: Gaussian marks)"},
                       {"theta", 0.0, -100.0, 100.0, false, false, false, "mean-reversion level"},
                       {"nested_step", 0.01, 0.0, 1.0, true, false, false, "Euler step of the nested diffusion"}})});
  c.push_back({"subordination-nonlinear", "c = F(zeta_y), F(z) = (z1, z2^2 / 2), zeta = A0 B", 2, {0.0, 0.0}, 1,
               false, false, false,
               concat(measure_params(1.0),
                      {{"nested_step", 0.01, 0.0, 1.0, true, false, false, "Euler step of the nested diffusion"}})});
  c.push_back({"levy-field-demo", "particle diffusing with matrix upsilon in a Levy field of forces", 2, {0.0, 0.0},
               1, false, false, true,
               concat(measure_params(1.0),
                      {{"upsilon0", 0.5, 0.0, 5.0, true, false, false, "diffusion scale"},
                       {"kappa", 0.5, 0.0, 0.99, false, false, false, "modulation, upsilon = upsilon0 (1 + kappa sin z1) I"},
                       {"nested_step", 0.01, 0.0, 1.0, true, false, false, "Euler step of the nested diffusion"}})});
  return c;
}

LevyMeasureSpec power_measure(const ScenarioConfig& cfg) {
  return LevyMeasureSpec::power_law(param_value(cfg, "epsilon"), param_value(cfg, "y_max"),
                                    param_value(cfg, "truncation"));
}

ScenarioInfo base_info(const ScenarioConfig& cfg, int dim, int mark_dim) {
  const CatalogEntry& e = catalog_entry(cfg.name);
  ScenarioInfo info;
  info.name = cfg.name;
  info.dim = dim;
  info.mark_dim = mark_dim;
  info.x0 = SVec<double>(dim);
  std::vector<double> x0 = cfg.x0;
  if (x0.empty()) x0 = static_cast<int>(e.default_x0.size()) == dim ? e.default_x0 : std::vector<double>(dim, e.default_x0.front());
  if (x0.size() == 1 && dim > 1) x0.assign(dim, x0[0]);
  if (static_cast<int>(x0.size()) != dim)
    fail(ErrorKind::Schema, fmt::format("scenario.x0: expected {} entries, got {}", dim, x0.size()));
  for (int i = 0; i < dim; ++i) info.x0[i] = x0[i];
  info.horizon = param_value(cfg, "horizon");
  info.measure = power_measure(cfg);
  info.compensated = cfg.has_compensated ? cfg.compensated : e.compensated_default;
  info.driver = cfg.driver;
  info.euler_step = param_value(cfg, "h");
  info.jet_order = cfg.jet_order < 0 ? e.max_jet_order : cfg.jet_order;
  return info;
}

/// u^-1-eps on [lo, hi]
BottomCoordinate power_coordinate(const EuclideanWeight& w, double eps, double lo, double hi) {
  BottomCoordinate b;
  b.xi = [w](double u) { return w(u); };
  b.dxi = [w](double u) { return w.derivative(u); };
  b.density = [eps](double u) { return std::pow(u, -1.0 - eps); };
  b.score = [eps](double u) { return -(1.0 + eps) / u; };
  b.lo = lo;
  b.hi = hi;
  return b;
}

BottomCoordinate gaussian_coordinate(double var) {
  BottomCoordinate b;
  b.xi = [var](double) { return var; };
  b.dxi = [](double) { return 0.0; };
  b.density = [var](double v) { return std::exp(-0.5 * v * v / var); };
  b.score = [var](double v) { return -v / var; };
  const double r = 12.0 * std::sqrt(var);
  b.lo = -r;
  b.hi = r;
  return b;
}

TestFunction poly2() {
  return {[](double u) { return u * u; }, [](double u) { return 2.0 * u; }, [](double) { return 2.0; }};
}
TestFunction cosine() {
  return {[](double u) { return std::cos(u); }, [](double u) { return -std::sin(u); },
          [](double u) { return -std::cos(u); }};
}

template <class T>
MarkJets<T> mark_jets(int d, int p) {
  MarkJets<T> m;
  m.dvc = SMat<T>(d, p);
  m.d2vc = SMat<T>(d, p);
  m.xi = SVec<T>(p);
  m.dxi = SVec<T>(p);
  m.score = SVec<T>(p);
  return m;
}

template <class T>
JumpJets<T> empty_jets(int d, int p) {
  JumpJets<T> j;
  j.c = SVec<T>(d);
  j.dxc = SMat<T>(d, d);
  j.d2xc = zero_tensor<T>(d);
  j.mark = mark_jets<T>(d, p);
  return j;
}

/// Shared access to the nested diffusion of the subordination scenarios.
class SubordinatedDiffusion {
 public:
  virtual ~SubordinatedDiffusion() = default;
  virtual WienerOUBottom diffusion() const = 0;
  virtual double nested_step() const = 0;
};

// ---------------------------------------------------------------------------

class CompoundScenario : public TemplatedScenario<CompoundScenario> {
 public:
  CompoundScenario(const ScenarioConfig& cfg, bool linear)
      : TemplatedScenario(base_info(cfg, 1, 1)), linear_(linear) {
    eps_ = param_value(cfg, "epsilon");
    const auto& m = info_.measure;
    w_ = EuclideanWeight{param_value(cfg, "xi_scale"), param_value(cfg, "xi_power"), param_value(cfg, "xi_taper_lo"),
                         param_value(cfg, "xi_taper_hi"), m.lo(), m.hi()};
    if (linear_) {
      beta_ = param_value(cfg, "beta");
      sigma1_ = param_value(cfg, "sigma1");
    }
    if (info_.compensated) {
      mean_u_ = compensator_integral(m, [](double u) { return u; }, 1.0);
      // integral of 1/2 (xi' + xi m'/m) against the measure; zero when xi m vanishes at both ends
      const double eps = eps_;
      const EuclideanWeight w = w_;
      gen_flux_ = compensator_integral(
          m, [w, eps](double u) { return 0.5 * (w.derivative(u) - w(u) * (1.0 + eps) / u); }, 1.0);
    }
  }

  template <class T>
  JumpJets<T> jets_t(double, const SVec<T>& x, const ResolvedMark&, const SVec<T>& v) const {
    JumpJets<T> j = empty_jets<T>(1, 1);
    const T& u = v[0];
    if (linear_) {
      j.c[0] = T(beta_) * x[0] * u;
      j.dxc(0, 0) = T(beta_) * u;
      j.mark.dvc(0, 0) = T(beta_) * x[0];
    } else {
      j.c[0] = u;
      j.mark.dvc(0, 0) = T(1.0);
    }
    j.mark.xi[0] = w_(u);
    j.mark.dxi[0] = w_.derivative(u);
    j.mark.score[0] = T(-(1.0 + eps_)) / u;
    return j;
  }

  template <class T>
  StepJets<T> steps_t(double, const SVec<T>& x) const {
    StepJets<T> z = zero_step_jets<T>(1);
    if (info_.compensated) {
      if (linear_) {
        z.drift[0] = T(-beta_ * mean_u_) * x[0];
        z.ddrift(0, 0) = T(-beta_ * mean_u_);
        z.gen_compensator[0] = T(beta_ * gen_flux_) * x[0];
      } else {
        z.drift[0] = T(-mean_u_);
        z.gen_compensator[0] = T(gen_flux_);
      }
    }
    if (linear_ && info_.driver != Driver::None) {
      z.sigma[0] = T(sigma1_) * x[0];
      z.dsigma(0, 0) = T(sigma1_);
    }
    return z;
  }

  bool has_order2_jets() const override { return true; }
  bool has_continuous_part() const override {
    return info_.compensated || (linear_ && sigma1_ != 0.0 && info_.driver != Driver::None);
  }

  std::vector<SymmetryCase> symmetry_cases() const override {
    return {{"u", power_coordinate(w_, eps_, w_.lo, w_.hi), poly2(), cosine()}};
  }

  double boundary_flux() const override {
    auto flux = [&](double u) { return std::abs(w_(u) * std::pow(u, -1.0 - eps_)); };
    return std::max(flux(w_.lo), flux(w_.hi));
  }

  std::optional<EllipticityProfile> ellipticity_profile() const override {
    if (linear_) return std::nullopt;
    const EuclideanWeight w = w_;
    return EllipticityProfile{[w](double u) { return w(u); }, 0.0};
  }

 private:
  bool linear_;
  double eps_ = 0.5;
  EuclideanWeight w_;
  double beta_ = 0.0, sigma1_ = 0.0;
  double mean_u_ = 0.0, gen_flux_ = 0.0;
};

// ---------------------------------------------------------------------------

class Simple2dScenario : public TemplatedScenario<Simple2dScenario> {
 public:
  explicit Simple2dScenario(const ScenarioConfig& cfg) : TemplatedScenario(base_info(cfg, 2, 1)) {}

  ResolvedMark resolve_mark(const MarkedPoissonPath& path, std::size_t i) const override {
    ResolvedMark m;
    m.y = path.jumps[i].mark;
    m.variance = m.y;
    m.v = SVec<double>(1);
    RngStream s = path.substream(i, StreamTag::NestedBrownian);
    m.v[0] = std::sqrt(m.y) * s.gaussian();
    return m;
  }

  template <class T>
  JumpJets<T> jets_t(double, const SVec<T>&, const ResolvedMark& m, const SVec<T>& v) const {
    JumpJets<T> j = empty_jets<T>(2, 1);
    const T& b = v[0];
    j.c[0] = b;
    j.c[1] = T(0.5) * b * b;
    j.mark.dvc(0, 0) = T(1.0);
    j.mark.dvc(1, 0) = b;
    j.mark.d2vc(1, 0) = T(1.0);
    j.mark.xi[0] = T(m.variance);
    j.mark.score[0] = -b / T(m.variance);
    return j;
  }

  bool has_order2_jets() const override { return true; }

  std::vector<SymmetryCase> symmetry_cases() const override {
    return {{"B_y at y = 0.5", gaussian_coordinate(0.5), poly2(), cosine()}};
  }
};

// ---------------------------------------------------------------------------

WienerOUBottom linear_diffusion(int d, double sigma0, double kappa, double theta) {
  WienerOUBottom w;
  w.d = d;
  w.q = d;
  w.a = [d, sigma0](const SVec<double>&) { return scale(SMat<double>::identity(d), sigma0); };
  w.da = [d](const SVec<double>&) { return std::vector<SMat<double>>(d, SMat<double>(d, d)); };
  w.b = [d, kappa, theta](const SVec<double>& z) {
    SVec<double> r(d);
    for (int i = 0; i < d; ++i) r[i] = -kappa * (z[i] - theta);
    return r;
  };
  w.db = [d, kappa](const SVec<double>&) { return scale(SMat<double>::identity(d), -kappa); };
  return w;
}

class SubordinationGaussian : public TemplatedScenario<SubordinationGaussian>, public SubordinatedDiffusion {
 public:
  explicit SubordinationGaussian(const ScenarioConfig& cfg)
      : TemplatedScenario(base_info(cfg, static_cast<int>(param_value(cfg, "dim")), static_cast<int>(param_value(cfg, "dim")))),
        sigma0_(param_value(cfg, "sigma0")),
        step_(param_value(cfg, "nested_step")) {}

  ResolvedMark resolve_mark(const MarkedPoissonPath& path, std::size_t i) const override {
    ResolvedMark m;
    m.y = path.jumps[i].mark;
    m.variance = m.y;
    m.v = SVec<double>(dim());
    RngStream s = path.substream(i, StreamTag::NestedBrownian);
    for (int k = 0; k < dim(); ++k) m.v[k] = std::sqrt(m.y) * s.gaussian();
    return m;
  }

  template <class T>
  JumpJets<T> jets_t(double, const SVec<T>&, const ResolvedMark& m, const SVec<T>& v) const {
    const int d = dim();
    JumpJets<T> j = empty_jets<T>(d, d);
    for (int k = 0; k < d; ++k) {
      j.c[k] = T(sigma0_) * v[k];
      j.mark.dvc(k, k) = T(sigma0_);
      j.mark.xi[k] = T(m.variance);
      j.mark.score[k] = -v[k] / T(m.variance);
    }
    return j;
  }

  bool has_order2_jets() const override { return true; }

  std::vector<SymmetryCase> symmetry_cases() const override {
    return {{"B_y at y = 0.5", gaussian_coordinate(0.5), poly2(), cosine()}};
  }

  std::optional<EllipticityProfile> ellipticity_profile() const override {
    const double s2 = sigma0_ * sigma0_;
    return EllipticityProfile{[s2](double y) { return s2 * y; }, 0.0};
  }

  WienerOUBottom diffusion() const override { return linear_diffusion(dim(), sigma0_, 0.0, 0.0); }
  double nested_step() const override { return step_; }

 private:
  double sigma0_;
  double step_;
};

class SubordinationEuler : public Scenario, public SubordinatedDiffusion {
 public:
  explicit SubordinationEuler(const ScenarioConfig& cfg)
      : Scenario(base_info(cfg, static_cast<int>(param_value(cfg, "dim")), 0)),
        bottom_(linear_diffusion(dim(), param_value(cfg, "sigma0"), param_value(cfg, "kappa"), param_value(cfg, "theta"))),
        step_(param_value(cfg, "nested_step")) {
    info_.nested_dim = dim();
    info_.nested_step = step_;
  }

  ResolvedMark resolve_mark(const MarkedPoissonPath& path, std::size_t i) const override {
    ResolvedMark m;
    m.y = path.jumps[i].mark;
    m.nested = nested_brownian(path, i, m.y, step_, dim());
    return m;
  }

  JumpEval eval_jump(double, const SVec<double>& x, const ResolvedMark& m) const override {
    JumpEval e;
    e.nested = wiener_ou_eval(bottom_, x, m.nested, true);
    e.has_nested = true;
    e.c = e.nested.displacement;
    e.dxc = e.nested.m - SMat<double>::identity(dim());
    e.gamma = e.nested.gamma_m;
    e.nested_outer = SMat<double>::identity(dim());
    e.flat_coef = SMat<double>(dim(), 0);
    return e;
  }

  // each nested Brownian increment is a Gaussian coordinate of the Wiener bottom
  std::vector<SymmetryCase> symmetry_cases() const override {
    return {{"nested increment over one step", gaussian_coordinate(step_), poly2(), cosine()}};
  }

  WienerOUBottom diffusion() const override { return bottom_; }
  double nested_step() const override { return step_; }

 private:
  WienerOUBottom bottom_;
  double step_;
};

// ---------------------------------------------------------------------------

class SubordinationNonlinear : public Scenario {
 public:
  explicit SubordinationNonlinear(const ScenarioConfig& cfg)
      : Scenario(base_info(cfg, 2, 0)), step_(param_value(cfg, "nested_step")) {
    info_.nested_dim = 2;
    info_.nested_step = step_;
    bottom_.d = 2;
    bottom_.q = 2;
    bottom_.a = [](const SVec<double>&) {
      SMat<double> a0(2, 2);
      a0(0, 0) = 1.0;
      a0(1, 0) = 1.0;
      return a0;
    };
    bottom_.da = [](const SVec<double>&) { return std::vector<SMat<double>>(2, SMat<double>(2, 2)); };
    bottom_.b = [](const SVec<double>&) { return SVec<double>(2); };
    bottom_.db = [](const SVec<double>&) { return SMat<double>(2, 2); };
  }

  // each nested Brownian increment is a Gaussian coordinate of the Wiener bottom
  std::vector<SymmetryCase> symmetry_cases() const override {
    return {{"nested increment over one step", gaussian_coordinate(step_), poly2(), cosine()}};
  }

  ResolvedMark resolve_mark(const MarkedPoissonPath& path, std::size_t i) const override {
    ResolvedMark m;
    m.y = path.jumps[i].mark;
    m.nested = nested_brownian(path, i, m.y, step_, 2);
    return m;
  }

  JumpEval eval_jump(double, const SVec<double>&, const ResolvedMark& m) const override {
    JumpEval e;
    e.nested = wiener_ou_eval(bottom_, SVec<double>(2), m.nested, true);
    e.has_nested = true;
    const SVec<double>& z = e.nested.displacement;
    e.c = SVec<double>(2);
    e.c[0] = z[0];
    e.c[1] = 0.5 * z[1] * z[1];
    e.dxc = SMat<double>(2, 2);
    SMat<double> jac(2, 2);  // F'(zeta)
    jac(0, 0) = 1.0;
    jac(1, 1) = z[1];
    e.nested_outer = jac;
    e.gamma = push_forward_gamma(jac, e.nested.gamma_m);
    e.flat_coef = SMat<double>(2, 0);
    return e;
  }

 private:
  WienerOUBottom bottom_;
  double step_;
};

// ---------------------------------------------------------------------------

/// Marks (r, theta, omega); c(x, u) = Z^x_r(theta) for
///   Z_s = int_0^s upsilon(Z + x) dB + s (cos theta, sin theta).
/// The compensator vanishes: theta is uniform and the stochastic integral centred.
class LevyFieldDemo : public Scenario {
 public:
  explicit LevyFieldDemo(const ScenarioConfig& cfg)
      : Scenario(base_info(cfg, 2, 0)),
        upsilon0_(param_value(cfg, "upsilon0")),
        kappa_(param_value(cfg, "kappa")),
        step_(param_value(cfg, "nested_step")) {
    info_.nested_dim = 2;
    info_.nested_step = step_;
  }

  ResolvedMark resolve_mark(const MarkedPoissonPath& path, std::size_t i) const override {
    ResolvedMark m;
    m.y = path.jumps[i].mark;
    RngStream s = path.substream(i, StreamTag::Angle);
    m.angle = 2.0 * boost::math::constants::pi<double>() * s.uniform();
    m.nested = nested_brownian(path, i, m.y, step_, 2);
    return m;
  }

  JumpEval eval_jump(double, const SVec<double>& x, const ResolvedMark& m) const override {
    const double u0 = upsilon0_, k = kappa_, th = m.angle;
    WienerOUBottom w;
    w.d = 2;
    w.q = 2;
    w.a = [u0, k](const SVec<double>& z) { return scale(SMat<double>::identity(2), u0 * (1.0 + k * std::sin(z[0]))); };
    w.da = [u0, k](const SVec<double>& z) {
      std::vector<SMat<double>> out(2, SMat<double>(2, 2));
      const double g = u0 * k * std::cos(z[0]);
      out[0](0, 0) = g;  // column 0 is a e_1, depends on z1 only
      out[1](1, 0) = g;
      return out;
    };
    w.b = [th](const SVec<double>&) {
      SVec<double> r(2);
      r[0] = std::cos(th);
      r[1] = std::sin(th);
      return r;
    };
    w.db = [](const SVec<double>&) { return SMat<double>(2, 2); };
    w.b_param = [th](const SVec<double>&) {
      SVec<double> r(2);
      r[0] = -std::sin(th);
      r[1] = std::cos(th);
      return r;
    };
    JumpEval e;
    e.nested = wiener_ou_eval(w, x, m.nested, true);
    e.has_nested = true;
    e.c = e.nested.displacement;
    e.dxc = e.nested.m - SMat<double>::identity(2);
    // angle coordinate with unit weight plus the Ornstein-Uhlenbeck part
    const SVec<double>& t = e.nested.param_tangent;
    e.gamma = e.nested.gamma_m + outer(t, t);
    e.flat_coef = SMat<double>(2, 1);
    e.flat_coef(0, 0) = t[0];
    e.flat_coef(1, 0) = t[1];
    e.nested_outer = SMat<double>::identity(2);
    return e;
  }

  std::vector<SymmetryCase> symmetry_cases() const override {
    BottomCoordinate b;
    b.xi = [](double) { return 1.0; };
    b.dxi = [](double) { return 0.0; };
    b.density = [](double) { return 1.0; };
    b.score = [](double) { return 0.0; };
    b.lo = 0.0;
    b.hi = 2.0 * boost::math::constants::pi<double>();
    b.periodic = true;
    TestFunction f{[](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
                   [](double t) { return -std::sin(t); }};
    TestFunction g{[](double t) { return std::cos(2 * t) + std::sin(t); },
                   [](double t) { return -2 * std::sin(2 * t) + std::cos(t); },
                   [](double t) { return -4 * std::cos(2 * t) - std::sin(t); }};
    return {{"theta", b, f, g}};
  }

 private:
  double upsilon0_, kappa_, step_;
};

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = build_catalog();
  return c;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  std::string known;
  for (const auto& e : catalog()) known += (known.empty() ? "" : ", ") + e.name;
  fail(ErrorKind::Schema, "scenario.name: unknown scenario '" + name + "' (known: " + known + ")");
}

double param_value(const ScenarioConfig& cfg, const std::string& name) {
  const CatalogEntry& e = catalog_entry(cfg.name);
  for (const auto& p : e.params) {
    if (p.name != name) continue;
    auto it = cfg.params.find(name);
    return it == cfg.params.end() ? p.def : it->second;
  }
  fail(ErrorKind::Schema, "scenario '" + cfg.name + "' has no parameter '" + name + "'");
}

std::vector<std::string> check_config(const ScenarioConfig& cfg) {
  std::vector<std::string> errs;
  const CatalogEntry* e = nullptr;
  for (const auto& c : catalog())
    if (c.name == cfg.name) e = &c;
  if (!e) {
    errs.push_back("scenario.name: unknown scenario '" + cfg.name + "'");
    return errs;
  }
  for (const auto& [k, v] : cfg.params) {
    auto it = std::find_if(e->params.begin(), e->params.end(), [&](const ParamSpec& p) { return p.name == k; });
    if (it == e->params.end()) {
      errs.push_back("scenario.params." + k + ": not a parameter of '" + cfg.name + "'");
      continue;
    }
    const ParamSpec& p = *it;
    const bool below = p.lo_open ? !(v > p.lo) : !(v >= p.lo);
    const bool above = p.hi_open ? !(v < p.hi) : !(v <= p.hi);
    if (below || above || !std::isfinite(v)) {
      errs.push_back(fmt::format("scenario.params.{}: {} outside {}{}, {}{} ({})", k, v, p.lo_open ? "(" : "[", p.lo, p.hi,
                                 p.hi_open ? ")" : "]", p.doc));
    } else if (p.integer && v != std::floor(v)) {
      errs.push_back(fmt::format("scenario.params.{}: must be an integer", k));
    }
  }
  if (errs.empty()) {
    if (!(param_value(cfg, "truncation") < param_value(cfg, "y_max")))
      errs.push_back("scenario.params.truncation: must be below y_max");
    if (param_value(cfg, "h") > param_value(cfg, "horizon")) errs.push_back("scenario.params.h: exceeds the horizon");
    const bool has_dim = std::any_of(e->params.begin(), e->params.end(), [](const ParamSpec& p) { return p.name == "dim"; });
    const auto dim = static_cast<std::size_t>(has_dim ? param_value(cfg, "dim") : e->default_dim);
    if (cfg.x0.size() > 1 && cfg.x0.size() != dim)
      errs.push_back(fmt::format("scenario.x0: expected {} entries, got {}", dim, cfg.x0.size()));
  }
  if (cfg.driver != Driver::None && !e->allows_driver)
    errs.push_back("scenario.driver: '" + cfg.name + "' has no continuous driver");
  if (cfg.has_compensated && cfg.compensated != e->compensated_default && !e->allows_compensation)
    errs.push_back("scenario.compensated: fixed for '" + cfg.name + "'");
  if (cfg.jet_order > e->max_jet_order)
    errs.push_back(fmt::format("scenario.jet_order: '{}' supports jets up to order {}", cfg.name, e->max_jet_order));
  return errs;
}

std::unique_ptr<Scenario> make_scenario(const ScenarioConfig& cfg) {
  const auto errs = check_config(cfg);
  if (!errs.empty()) fail(ErrorKind::Schema, errs.front());
  if (cfg.name == "compound") return std::make_unique<CompoundScenario>(cfg, false);
  if (cfg.name == "compound-linear") return std::make_unique<CompoundScenario>(cfg, true);
  if (cfg.name == "simple2d") return std::make_unique<Simple2dScenario>(cfg);
  if (cfg.name == "subordination-linear") {
    if (param_value(cfg, "kappa") == 0.0) return std::make_unique<SubordinationGaussian>(cfg);
    if (cfg.jet_order > 1) fail(ErrorKind::Capability, "subordination-linear with kappa > 0 supports jets up to order 1");
    return std::make_unique<SubordinationEuler>(cfg);
  }
  if (cfg.name == "subordination-nonlinear") return std::make_unique<SubordinationNonlinear>(cfg);
  if (cfg.name == "levy-field-demo") return std::make_unique<LevyFieldDemo>(cfg);
  fail(ErrorKind::Schema, "scenario.name: unknown scenario '" + cfg.name + "'");
}

double simple2d_indicator_bound(const Trajectory& t) {
  double m1 = 0.0, m2 = 0.0;
  for (const auto& m : t.marks) {
    if (!(m.y < 1.0) || m.v.size() < 1) continue;
    const double r = std::sqrt(m.y);
    if (m.v[0] >= r) m1 += m.y * m.y;
    if (m.v[0] <= -r) m2 += m.y * m.y;
  }
  return std::min(m1, m2);
}

SVec<double> subordination_direct_sample(const Scenario& sc, const MarkedPoissonPath& path) {
  const auto* sub = dynamic_cast<const SubordinatedDiffusion*>(&sc);
  if (!sub) fail(ErrorKind::Capability, "scenario '" + sc.name() + "' is not a subordinated diffusion");
  double total = 0.0;
  for (const auto& j : path.jumps) total += j.mark;
  RngStream s(StreamKey{path.origin.seed, path.origin.path, 0, StreamTag::Generic, 1});
  const BrownianIncrements inc = nested_brownian(total, sub->nested_step(), sc.dim(), s);
  return sc.info().x0 + wiener_ou_eval(sub->diffusion(), sc.info().x0, inc).displacement;
}

}  // namespace lp
