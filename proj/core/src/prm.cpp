#include "lentparticle/prm.hpp"

#include <algorithm>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <ostream>

#include "lentparticle/error.hpp"

namespace lp {

namespace {

using PoissonDist = boost::math::poisson_distribution<
    double, boost::math::policies::policy<boost::math::policies::discrete_quantile<
                boost::math::policies::integer_round_up>>>;

std::size_t poisson_count(double mean, double u) {
  if (mean <= 0.0) return 0;
  const PoissonDist dist(mean);
  const double k = boost::math::quantile(dist, u);
  return static_cast<std::size_t>(std::max(0.0, k));
}

}  // namespace

RngStream MarkedPoissonPath::substream(std::size_t jump, StreamTag tag, std::uint32_t sub) const {
  StreamKey k = origin;
  k.jump = jump;
  k.tag = tag;
  k.sub = sub;
  return RngStream(k);
}

double MarkedPoissonPath::rho_mark(std::size_t jump, int block, int k) const {
  if (block >= rho_order || k >= rho_width) fail(ErrorKind::Domain, "rho_mark: block or coordinate out of range");
  return rho[jump][static_cast<std::size_t>(block * rho_width + k)];
}

MarkedPoissonPath sample_path(const LevyMeasureSpec& spec, double horizon, const StreamKey& origin) {
  if (!(horizon >= 0.0)) fail(ErrorKind::Domain, "sample_path: horizon must be >= 0");
  MarkedPoissonPath p;
  p.horizon = horizon;
  p.origin = origin;
  p.origin.tag = StreamTag::Skeleton;
  p.origin.jump = 0;
  p.origin.sub = 0;
  const double mass = total_mass(spec);
  if (mass == 0.0 || horizon == 0.0) return p;
  RngStream skel(p.origin);
  const std::size_t n = poisson_count(horizon * mass, skel.uniform());
  std::vector<double> times(n);
  for (auto& t : times) t = horizon * skel.uniform();
  std::sort(times.begin(), times.end());
  p.jumps.resize(n);
  const MarkQuantile quantile(spec);
  for (std::size_t i = 0; i < n; ++i) p.jumps[i] = {times[i], quantile(p.substream(i, StreamTag::Mark).uniform())};
  return p;
}

std::vector<double> sample_marks(const LevyMeasureSpec& spec, double horizon, const StreamKey& origin) {
  if (!(horizon >= 0.0)) fail(ErrorKind::Domain, "sample_marks: horizon must be >= 0");
  StreamKey key = origin;
  key.tag = StreamTag::Skeleton;
  key.jump = 0;
  key.sub = 0;
  const double mass = total_mass(spec);
  if (mass == 0.0 || horizon == 0.0) return {};
  RngStream skel(key);
  std::vector<double> marks(poisson_count(horizon * mass, skel.uniform()));
  key.tag = StreamTag::Mark;
  const MarkQuantile quantile(spec);
  for (std::size_t i = 0; i < marks.size(); ++i) {
    key.jump = i;
    marks[i] = quantile(RngStream(key).uniform());
  }
  return marks;
}

MarkedPoissonPath attach_rho_marks(const MarkedPoissonPath& path, int order, RhoBasis basis, int width,
                                   std::uint32_t replica) {
  if (order < 1) fail(ErrorKind::Domain, "attach_rho_marks: order must be >= 1");
  if (width < 1) fail(ErrorKind::Domain, "attach_rho_marks: width must be >= 1");
  if (replica >= (1u << 20)) fail(ErrorKind::Domain, "attach_rho_marks: replica index too large");
  MarkedPoissonPath p = path;
  p.rho_order = order;
  p.rho_width = width;
  p.basis = basis;
  p.rho_replica = replica;
  p.rho.assign(path.size(), std::vector<double>(static_cast<std::size_t>(order * width)));
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (int b = 0; b < order; ++b) {
      RngStream s = path.substream(i, StreamTag::Rho, replica * 8u + static_cast<std::uint32_t>(b));
      for (int k = 0; k < width; ++k)
        p.rho[i][static_cast<std::size_t>(b * width + k)] = basis == RhoBasis::Gaussian ? s.gaussian() : s.rademacher();
    }
  }
  return p;
}

MarkedPoissonPath superpose(const MarkedPoissonPath& a, const MarkedPoissonPath& b) {
  if (a.horizon != b.horizon) fail(ErrorKind::Domain, "superpose: horizons differ");
  MarkedPoissonPath p;
  p.horizon = a.horizon;
  p.origin = a.origin;
  p.jumps = a.jumps;
  p.jumps.insert(p.jumps.end(), b.jumps.begin(), b.jumps.end());
  std::stable_sort(p.jumps.begin(), p.jumps.end(), [](const Jump& x, const Jump& y) { return x.time < y.time; });
  return p;
}

double BrownianIncrements::terminal(int k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dt.size(); ++i) s += dw[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
  return s;
}

BrownianIncrements nested_brownian(double duration, double step, int dim, RngStream& stream) {
  if (!(duration >= 0.0) || !(step > 0.0)) fail(ErrorKind::Domain, "nested_brownian: need duration >= 0, step > 0");
  BrownianIncrements b;
  b.dim = dim;
  if (duration == 0.0) return b;
  const auto n = static_cast<std::size_t>(std::ceil(duration / step - 1e-12));
  b.dt.resize(n);
  b.dw.resize(n * static_cast<std::size_t>(dim));
  double left = duration;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = (i + 1 == n) ? left : std::min(step, left);
    b.dt[i] = h;
    left -= h;
    const double sh = std::sqrt(h);
    for (int k = 0; k < dim; ++k) b.dw[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] = sh * stream.gaussian();
  }
  return b;
}

BrownianIncrements nested_brownian(const MarkedPoissonPath& path, std::size_t jump, double duration, double step,
                                   int dim) {
  RngStream s = path.substream(jump, StreamTag::NestedBrownian);
  return nested_brownian(duration, step, dim, s);
}

void write_path_csv(std::ostream& os, const MarkedPoissonPath& path) {
  os << "time,mark\n";
  os.precision(17);
  for (const auto& j : path.jumps) os << j.time << ',' << j.mark << '\n';
}

}  // namespace lp
