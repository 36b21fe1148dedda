#pragma once
/// Counter-based random streams (Philox4x32-10).
///
/// A stream is addressed by (seed, path, jump, tag, sub). Two streams with
/// different addresses are independent; the same address always replays the
/// same sequence, whatever thread evaluates it.

#include <array>
#include <cstdint>

namespace lp {

enum class StreamTag : std::uint32_t {
  Skeleton = 0,        // jump count and jump times
  Mark = 1,            // mark drawn from the measure
  Rho = 2,             // auxiliary gradient marks
  NestedBrownian = 3,  // Brownian path carried by a mark
  Continuous = 4,      // driver increments between jumps
  Angle = 5,           // angular mark component
  RhoNested = 6,       // auxiliary Brownian path for nested gradients
  Generic = 7          // standalone sampling (tests, diagnostics)
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::uint64_t jump = 0;
  StreamTag tag = StreamTag::Generic;
  std::uint32_t sub = 0;  // replica / block index, < 2^24

  bool operator==(const StreamKey&) const = default;
};

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

class RngStream {
 public:
  explicit RngStream(const StreamKey& key);

  const StreamKey& key() const { return key_; }

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform();
  double gaussian();
  /// +1 or -1 with probability 1/2.
  double rademacher();
  std::uint64_t next_u64();

  /// Stream with the same address except for the sub index.
  RngStream with_sub(std::uint32_t sub) const;

 private:
  void refill();

  StreamKey key_;
  std::array<std::uint32_t, 2> pkey_{};
  std::uint32_t c1_ = 0, c2_ = 0, c3_ = 0;
  std::uint32_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lp
