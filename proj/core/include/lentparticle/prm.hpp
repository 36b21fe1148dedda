#pragma once
/// Marked Poisson random measures on [0,T] x marks, their enrichment with
/// auxiliary gradient marks, and lazily generated Brownian marks.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lentparticle/jump_measure.hpp"
#include "lentparticle/rng.hpp"

namespace lp {

enum class RhoBasis { Gaussian, Rademacher };

struct Jump {
  double time = 0.0;
  double mark = 0.0;
};

struct MarkedPoissonPath {
  double horizon = 0.0;
  std::vector<Jump> jumps;
  /// seed and path index; every per-jump substream derives from it
  StreamKey origin;
  /// auxiliary marks: rho[i] holds order * width draws for jump i,
  /// block b occupying [b*width, (b+1)*width)
  int rho_order = 0;
  int rho_width = 0;
  RhoBasis basis = RhoBasis::Gaussian;
  std::uint32_t rho_replica = 0;
  std::vector<std::vector<double>> rho;

  std::size_t size() const { return jumps.size(); }
  /// Substream of jump i with the given purpose.
  RngStream substream(std::size_t jump, StreamTag tag, std::uint32_t sub = 0) const;
  /// Auxiliary mark of block b, coordinate k at jump i.
  double rho_mark(std::size_t jump, int block, int k = 0) const;
};

/// Jump count ~ Poisson(T * mass), uniform sorted times, marks by inverse CDF.
MarkedPoissonPath sample_path(const LevyMeasureSpec& spec, double horizon, const StreamKey& origin);

/// The marks sample_path would draw for the same origin, without the times.
std::vector<double> sample_marks(const LevyMeasureSpec& spec, double horizon, const StreamKey& origin);

/// Copy of the path carrying `order` independent auxiliary blocks of `width`
/// coordinates per jump. The replica index selects an independent enrichment.
MarkedPoissonPath attach_rho_marks(const MarkedPoissonPath& path, int order, RhoBasis basis, int width = 1,
                                   std::uint32_t replica = 0);

/// Merge two paths on the same horizon (times re-sorted).
MarkedPoissonPath superpose(const MarkedPoissonPath& a, const MarkedPoissonPath& b);

struct BrownianIncrements {
  int dim = 1;
  std::vector<double> dt;  // step lengths, summing to the duration
  std::vector<double> dw;  // dim increments per step, step-major

  std::size_t steps() const { return dt.size(); }
  double terminal(int k = 0) const;
};

/// ceil(y/h) steps of length min(h, remaining) with independent N(0, dt) increments.
BrownianIncrements nested_brownian(double duration, double step, int dim, RngStream& stream);
/// Nested Brownian mark of jump `jump` on `path` (purpose NestedBrownian).
BrownianIncrements nested_brownian(const MarkedPoissonPath& path, std::size_t jump, double duration, double step,
                                   int dim);

/// Debug dump: one row per jump (time, mark).
void write_path_csv(std::ostream& os, const MarkedPoissonPath& path);

}  // namespace lp
