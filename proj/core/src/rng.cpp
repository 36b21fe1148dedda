#include "lentparticle/rng.hpp"

#include <cmath>
#include <numbers>

#include "lentparticle/error.hpp"

namespace lp {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

RngStream::RngStream(const StreamKey& key) : key_(key) {
  if (key.sub >= (1u << 24)) fail(ErrorKind::Domain, "rng: sub index must be < 2^24");
  pkey_ = {static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)};
  // The path and jump indices are folded to 32 bits each; the high halves are
  // mixed into the tag word so that large indices still give distinct counters.
  const auto path_hi = static_cast<std::uint32_t>(key.path >> 32);
  const auto jump_hi = static_cast<std::uint32_t>(key.jump >> 32);
  c1_ = (static_cast<std::uint32_t>(key.tag) << 24) | key.sub;
  c2_ = static_cast<std::uint32_t>(key.jump);
  c3_ = static_cast<std::uint32_t>(key.path);
  if (path_hi != 0 || jump_hi != 0) {
    pkey_[0] ^= path_hi * 0x85EBCA6Bu;
    pkey_[1] ^= jump_hi * 0xC2B2AE35u;
  }
}

void RngStream::refill() {
  block_ = philox4x32_10({counter_, c1_, c2_, c3_}, pkey_);
  ++counter_;
  used_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (used_ > 2) refill();
  const std::uint64_t v = (static_cast<std::uint64_t>(block_[used_]) << 32) | block_[used_ + 1];
  used_ += 2;
  return v;
}

double RngStream::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double RngStream::rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

RngStream RngStream::with_sub(std::uint32_t sub) const {
  StreamKey k = key_;
  k.sub = sub;
  return RngStream(k);
}

}  // namespace lp
