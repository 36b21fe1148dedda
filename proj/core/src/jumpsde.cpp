#include "lentparticle/jumpsde.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "lentparticle/error.hpp"

namespace lp {

namespace {

constexpr double kDetFloor = 1e-12;

template <class T>
struct Piece {
  SVec<T> c;
  SMat<T> dxc;
  Tensor3<T> d2xc;
  SMat<T> gamma;
  SVec<T> gen;
  bool second_order = false;
  bool has_mark = false;
  SMat<T> dvc;
  SVec<T> xi;
};

Piece<double> make_piece(const Scenario& sc, double s, const SVec<double>& x, const ResolvedMark& m,
                         const SVec<double>&, JumpEval* keep) {
  JumpEval e = sc.eval_jump(s, x, m);
  Piece<double> p;
  p.c = e.c;
  p.dxc = e.dxc;
  p.d2xc = e.d2xc;
  p.gamma = e.gamma;
  p.gen = e.gen;
  p.second_order = e.second_order;
  p.has_mark = e.has_mark_jets;
  if (p.has_mark) {
    p.dvc = e.mark.dvc;
    p.xi = e.mark.xi;
  }
  if (keep) *keep = std::move(e);
  return p;
}

Piece<Taylor> make_piece(const Scenario& sc, double s, const SVec<Taylor>& x, const ResolvedMark& m,
                         const SVec<Taylor>& v, void*) {
  JumpJets<Taylor> j = sc.jump_jets(s, x, m, v);
  Piece<Taylor> p;
  p.c = j.c;
  p.dxc = j.dxc;
  p.d2xc = j.d2xc;
  p.gamma = euclidean_gamma(j.mark);
  p.gen = euclidean_generator(j.mark);
  p.second_order = true;
  p.has_mark = true;
  p.dvc = j.mark.dvc;
  p.xi = j.mark.xi;
  return p;
}

template <class T>
struct SweepOut {
  SVec<T> x;
  SMat<T> K, Kbar, C;
  SVec<T> A;
  std::vector<SMat<T>> q;  // Kbar just after jump i times d_v c_i
  std::vector<SVec<T>> xi;
};

[[noreturn]] void singular_jump(std::size_t i, double t, double det) {
  fail(ErrorKind::Hypothesis,
       fmt::format("jump {} at t={:.6g}: |det(I + D_x c)| = {:.3g} below {:.0e}; the flow is not invertible", i, t,
                   std::abs(det), kDetFloor));
}

[[noreturn]] void singular_step(std::size_t k, double t, double det) {
  fail(ErrorKind::Numeric,
       fmt::format("Euler step {} ending at t={:.6g}: Jacobian determinant {:.3g}; reduce the step", k, t, det));
}

template <class T>
SweepOut<T> sweep(const Scenario& sc, const std::vector<Event>& events, const std::vector<ResolvedMark>& marks,
                  const std::vector<SVec<T>>& v, int level, Trajectory* log) {
  const int d = sc.dim();
  SweepOut<T> st;
  st.x = SVec<T>(d);
  for (int i = 0; i < d; ++i) st.x[i] = T(sc.info().x0[i]);
  const SMat<T> eye = SMat<T>::identity(d);
  st.K = eye;
  st.Kbar = eye;
  st.C = SMat<T>(d, d);
  st.A = SVec<T>(d);
  st.q.resize(marks.size());
  st.xi.resize(marks.size());

  constexpr bool logging = std::is_same_v<T, double>;
  if constexpr (logging) {
    if (log) {
      log->x.push_back(st.x);
      if (level >= 1) {
        log->K.push_back(st.K);
        log->Kbar.push_back(st.Kbar);
        log->C.push_back(st.C);
      }
      if (level >= 2) log->A.push_back(st.A);
    }
  }

  for (std::size_t k = 0; k < events.size(); ++k) {
    const Event& ev = events[k];
    SMat<T> jac;
    if (!ev.is_jump) {
      const StepJets<T> sj = sc.step_jets(ev.time - ev.dt, st.x);
      jac = eye + scale(sj.ddrift, ev.dt) + scale(sj.dsigma, ev.dz);
      if (level >= 2) {
        const SMat<T> g = congruence(st.K, st.C);
        const SVec<T> curv = scale(contract(sj.d2drift, g, d), T(0.5 * ev.dt)) +
                             scale(contract(sj.d2sigma, g, d), T(0.5 * ev.dz));
        st.A = jac * st.A + curv - scale(sj.gen_compensator, T(ev.dt));
      }
      st.x = st.x + scale(sj.drift, T(ev.dt)) + scale(sj.sigma, T(ev.dz));
      if (level >= 1) {
        const double det = value_of(determinant(jac));
        if (!(std::abs(det) > kDetFloor)) singular_step(k, ev.time, det);
        st.K = jac * st.K;
        st.Kbar = st.Kbar * inverse(jac);
      }
    } else {
      const std::size_t i = ev.jump;
      JumpEval* keep = nullptr;
      if constexpr (logging) {
        if (log) keep = &log->jumps[i];
      }
      const Piece<T> pc = make_piece(sc, ev.time, st.x, marks[i], v[i], keep);
      jac = eye + pc.dxc;
      if (level >= 1) {
        const double det = value_of(determinant(jac));
        if (!(std::abs(det) > kDetFloor)) singular_jump(i, ev.time, det);
      }
      if (level >= 2) {
        if (!pc.second_order)
          fail(ErrorKind::Capability, "scenario '" + sc.name() + "' has no second-order jump data");
        const SMat<T> g = congruence(st.K, st.C);
        st.A = jac * st.A + scale(contract(pc.d2xc, g, d), T(0.5)) + pc.gen;
      }
      st.x = st.x + pc.c;
      if (level >= 1) {
        st.K = jac * st.K;
        st.Kbar = st.Kbar * inverse(jac);
        st.C = st.C + congruence(st.Kbar, pc.gamma);
        if (pc.has_mark) {
          st.q[i] = st.Kbar * pc.dvc;
          st.xi[i] = pc.xi;
        }
      }
    }
    if constexpr (logging) {
      if (log) {
        log->jac.push_back(jac);
        log->x.push_back(st.x);
        if (level >= 1) {
          log->K.push_back(st.K);
          log->Kbar.push_back(st.Kbar);
          log->C.push_back(st.C);
        }
        if (level >= 2) log->A.push_back(st.A);
      }
    }
  }
  return st;
}

Trajectory start_trajectory(const Scenario& sc, const MarkedPoissonPath& path) {
  Trajectory t;
  t.dim = sc.dim();
  t.horizon = sc.horizon();
  t.events = plan_events(sc, path);
  t.marks.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) t.marks.push_back(sc.resolve_mark(path, i));
  t.jumps.resize(path.size());
  t.jump_event.resize(path.size());
  for (std::size_t k = 0; k < t.events.size(); ++k)
    if (t.events[k].is_jump) t.jump_event[t.events[k].jump] = k;
  t.x.reserve(t.events.size() + 1);
  t.jac.reserve(t.events.size());
  return t;
}

std::vector<SVec<double>> mark_coordinates(const Trajectory& t) {
  std::vector<SVec<double>> v;
  v.reserve(t.marks.size());
  for (const auto& m : t.marks) v.push_back(m.v);
  return v;
}

}  // namespace

std::vector<Event> plan_events(const Scenario& sc, const MarkedPoissonPath& path) {
  std::vector<Event> out;
  const double T = sc.horizon();
  const auto& jumps = path.jumps;
  if (!sc.has_continuous_part()) {
    out.reserve(jumps.size());
    for (std::size_t j = 0; j < jumps.size(); ++j) out.push_back({jumps[j].time, true, j, 0.0, 0.0});
    return out;
  }
  const double h = sc.euler_step();
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(T / h - 1e-9)));
  out.reserve(n + 2 * jumps.size());
  const Driver driver = sc.info().driver;
  auto push_step = [&](double from, double to) {
    if (!(to > from)) return;
    Event e;
    e.time = to;
    e.dt = to - from;
    if (driver == Driver::Time) {
      e.dz = e.dt;
    } else if (driver == Driver::Brownian) {
      RngStream rs(StreamKey{path.origin.seed, path.origin.path, out.size(), StreamTag::Continuous, 0});
      e.dz = std::sqrt(e.dt) * rs.gaussian();
    }
    out.push_back(e);
  };
  double t = 0.0;
  std::size_t j = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double tk = k == n ? T : T * static_cast<double>(k) / static_cast<double>(n);
    while (j < jumps.size() && jumps[j].time <= tk) {
      push_step(t, jumps[j].time);
      t = std::max(t, jumps[j].time);
      out.push_back({jumps[j].time, true, j, 0.0, 0.0});
      ++j;
    }
    push_step(t, tk);
    t = tk;
  }
  return out;
}

SMat<double> Trajectory::gamma_at(long k) const {
  const std::size_t idx = k < 0 ? x.size() - 1 : static_cast<std::size_t>(k) + 1;
  if (idx >= C.size()) fail(ErrorKind::Capability, "Malliavin matrix not accumulated");
  return congruence(K[idx], C[idx]);
}

SMat<double> Trajectory::mark_gradient(std::size_t i) const {
  if (K.empty()) fail(ErrorKind::Capability, "flow not computed");
  if (!jumps[i].has_mark_jets) fail(ErrorKind::Capability, "jump has no mark derivatives");
  return K.back() * kbar_after_jump(i) * jumps[i].mark.dvc;
}

Trajectory solve(const Scenario& sc, const MarkedPoissonPath& path) {
  Trajectory t = start_trajectory(sc, path);
  const auto v = mark_coordinates(t);
  sweep<double>(sc, t.events, t.marks, v, 0, &t);
  return t;
}

void flow(Trajectory& t) {
  const int d = t.dim;
  t.K.assign(1, SMat<double>::identity(d));
  t.Kbar.assign(1, SMat<double>::identity(d));
  for (std::size_t k = 0; k < t.events.size(); ++k) {
    const SMat<double>& j = t.jac[k];
    const double det = determinant(j);
    if (!(std::abs(det) > kDetFloor)) {
      if (t.events[k].is_jump) singular_jump(t.events[k].jump, t.events[k].time, det);
      singular_step(k, t.events[k].time, det);
    }
    t.K.push_back(j * t.K.back());
    t.Kbar.push_back(t.Kbar.back() * inverse(j));
  }
}

void generator_path(const Scenario& sc, Trajectory& t) {
  if (t.C.size() != t.x.size()) fail(ErrorKind::Capability, "generator path needs the Malliavin accumulator");
  const int d = t.dim;
  t.A.assign(1, SVec<double>(d));
  for (std::size_t k = 0; k < t.events.size(); ++k) {
    const Event& ev = t.events[k];
    const SMat<double> g = congruence(t.K[k], t.C[k]);
    const SVec<double>& a = t.A.back();
    if (ev.is_jump) {
      const JumpEval& e = t.jumps[ev.jump];
      if (!e.second_order)
        fail(ErrorKind::Capability, "scenario '" + sc.name() + "' has no generator for its jump coefficient");
      t.A.push_back(t.jac[k] * a + scale(contract(e.d2xc, g, d), 0.5) + e.gen);
    } else {
      const StepJets<double> sj = sc.step_jets(ev.time - ev.dt, t.x[k]);
      const SVec<double> curv = scale(contract(sj.d2drift, g, d), 0.5 * ev.dt) +
                                scale(contract(sj.d2sigma, g, d), 0.5 * ev.dz);
      t.A.push_back(t.jac[k] * a + curv - scale(sj.gen_compensator, ev.dt));
    }
  }
  t.level = std::max(t.level, 2);
}

DirectionalPass directional_pass(const Scenario& sc, const Trajectory& t, const std::vector<SVec<double>>& direction,
                                 int level) {
  if (!sc.has_mark_jets()) fail(ErrorKind::Capability, "scenario '" + sc.name() + "' has no closed-form mark jets");
  std::vector<SVec<Taylor>> v(t.marks.size());
  for (std::size_t i = 0; i < t.marks.size(); ++i) {
    const SVec<double>& m = t.marks[i].v;
    v[i] = SVec<Taylor>(m.size());
    for (int k = 0; k < m.size(); ++k) v[i][k] = Taylor::variable(m[k], direction[i][k]);
  }
  SweepOut<Taylor> st = sweep<Taylor>(sc, t.events, t.marks, v, level, nullptr);
  DirectionalPass out;
  out.x = st.x;
  out.gamma = congruence(st.K, st.C);
  out.A = st.A;
  out.grad.reserve(st.q.size());
  for (const auto& q : st.q) out.grad.push_back(st.K * q);
  out.xi = std::move(st.xi);
  return out;
}

void gamma_table(const Scenario& sc, Trajectory& t) {
  const int d = t.dim;
  const std::size_t n = t.marks.size();
  std::vector<SMat<double>> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = t.mark_gradient(i);
  t.table.clear();
  for (int j = 0; j < d; ++j) {
    std::vector<SVec<double>> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& xi = t.jumps[i].mark.xi;
      w[i] = SVec<double>(xi.size());
      for (int k = 0; k < xi.size(); ++k) w[i][k] = xi[k] * g[i](j, k);
    }
    const DirectionalPass p = directional_pass(sc, t, w, 2);
    GammaTableRow row;
    row.dX = SVec<double>(d);
    row.dA = SVec<double>(d);
    for (int k = 0; k < d; ++k) {
      row.dX[k] = p.x[k].d1;
      row.dA[k] = p.A[k].d1;
    }
    row.dGamma = first_derivs(p.gamma);
    t.table.push_back(row);
  }
}

JetSystem::JetSystem(const Scenario& sc, int order) : sc_(&sc), order_(order) {
  if (order < 0 || order > 2) fail(ErrorKind::Domain, "jet order must be 0, 1 or 2");
  if (order == 2 && !sc.has_mark_jets())
    fail(ErrorKind::Capability, "scenario '" + sc.name() + "' supports jets up to order 1");
}

int JetSystem::size() const {
  const int d = sc_->dim();
  int n = d;
  if (order_ >= 1) n += 3 * d * d;
  if (order_ >= 2) n += d + d * d * (d + 1) / 2;
  return n;
}

Trajectory JetSystem::solve(const MarkedPoissonPath& path) const {
  Trajectory t = start_trajectory(*sc_, path);
  const auto v = mark_coordinates(t);
  sweep<double>(*sc_, t.events, t.marks, v, order_, &t);
  t.level = order_;
  if (order_ >= 2) gamma_table(*sc_, t);
  return t;
}

JetSystem augment_jet(const Scenario& sc, int order) { return JetSystem(sc, order); }

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "time";
  for (int i = 0; i < t.dim; ++i) os << ",x" << i;
  os << ",detK,trC\n";
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    os << fmt::format("{:.17g}", k == 0 ? 0.0 : t.events[k - 1].time);
    for (int i = 0; i < t.dim; ++i) os << fmt::format(",{:.17g}", t.x[k][i]);
    if (k < t.K.size()) {
      os << fmt::format(",{:.17g}", determinant(t.K[k]));
    } else {
      os << ",";
    }
    if (k < t.C.size()) {
      double tr = 0.0;
      for (int i = 0; i < t.dim; ++i) tr += t.C[k](i, i);
      os << fmt::format(",{:.17g}", tr);
    } else {
      os << ",";
    }
    os << '\n';
  }
}

}  // namespace lp
