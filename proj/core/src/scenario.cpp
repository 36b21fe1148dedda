#include "lentparticle/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "lentparticle/error.hpp"

namespace lp {

const char* to_string(Driver d) {
  switch (d) {
    case Driver::None: return "none";
    case Driver::Time: return "time";
    case Driver::Brownian: return "brownian";
  }
  return "?";
}

Scenario::Scenario(ScenarioInfo info) : info_(std::move(info)) {
  if (info_.dim < 1 || info_.dim > kMaxDim) fail(ErrorKind::Domain, "state dimension must be in [1, 4]");
  if (info_.mark_dim < 0 || info_.mark_dim > kMaxDim) fail(ErrorKind::Domain, "mark dimension must be in [0, 4]");
  if (info_.x0.size() != info_.dim) fail(ErrorKind::Domain, "x0 has the wrong dimension");
  if (!(info_.horizon > 0.0)) fail(ErrorKind::Domain, "horizon must be positive");
}

double Scenario::euler_step() const {
  return info_.euler_step > 0.0 ? info_.euler_step : info_.horizon / 1000.0;
}

ResolvedMark Scenario::resolve_mark(const MarkedPoissonPath& path, std::size_t jump) const {
  ResolvedMark m;
  m.y = path.jumps[jump].mark;
  m.v = SVec<double>(1);
  m.v[0] = m.y;
  return m;
}

JumpJets<double> Scenario::jump_jets(double, const SVec<double>&, const ResolvedMark&, const SVec<double>&) const {
  fail(ErrorKind::Capability, "scenario '" + name() + "' has no closed-form mark jets");
}

JumpJets<Taylor> Scenario::jump_jets(double, const SVec<Taylor>&, const ResolvedMark&, const SVec<Taylor>&) const {
  fail(ErrorKind::Capability, "scenario '" + name() + "' has no closed-form mark jets");
}

JumpEval Scenario::eval_jump(double s, const SVec<double>& x, const ResolvedMark& m) const {
  if (!has_mark_jets()) fail(ErrorKind::Capability, "scenario '" + name() + "' cannot evaluate jumps");
  return jump_eval_from_jets(jump_jets(s, x, m, m.v), true);
}

StepJets<double> Scenario::step_jets(double, const SVec<double>& x) const {
  return zero_step_jets<double>(x.size());
}

StepJets<Taylor> Scenario::step_jets(double, const SVec<Taylor>& x) const {
  return zero_step_jets<Taylor>(x.size());
}

std::vector<HypothesisProbe> Scenario::hypothesis_probes(int budget, std::uint64_t seed) const {
  std::vector<HypothesisProbe> out;
  out.reserve(budget);
  const double lo = measure().lo(), hi = measure().hi();
  // the first probes sit at x0 on a mark grid that includes both support ends
  const int grid = std::isfinite(hi) ? std::min(budget / 2, 17) : 0;
  for (int i = 0; i < budget; ++i) {
    RngStream rs(StreamKey{seed, static_cast<std::uint64_t>(i), 0, StreamTag::Generic, 0});
    MarkedPoissonPath path;
    path.horizon = horizon();
    path.origin = StreamKey{seed, static_cast<std::uint64_t>(i), 0, StreamTag::Skeleton, 0};
    const double y = i < grid ? lo + (hi - lo) * i / std::max(1, grid - 1) : sample_mark(measure(), rs);
    path.jumps.push_back({rs.uniform() * horizon(), y});
    HypothesisProbe p;
    p.s = path.jumps[0].time;
    p.x = info_.x0;
    if (i >= grid)
      for (int k = 0; k < dim(); ++k) p.x[k] += 2.0 * rs.gaussian();
    p.mark = resolve_mark(path, 0);
    out.push_back(std::move(p));
  }
  return out;
}

JumpEval jump_eval_from_jets(const JumpJets<double>& j, bool second_order) {
  JumpEval e;
  e.c = j.c;
  e.dxc = j.dxc;
  e.gamma = euclidean_gamma(j.mark);
  e.second_order = second_order;
  e.has_mark_jets = true;
  e.mark = j.mark;
  e.flat_coef = flat_coefficients(j.mark);
  if (second_order) {
    e.d2xc = j.d2xc;
    e.gen = euclidean_generator(j.mark);
  }
  return e;
}

}  // namespace lp
