#pragma once

#include <cstdint>

namespace clab {

// Counter-based pseudo-random generator (Philox4x32-10).
//
// A generator is identified by a 64-bit seed and a 64-bit stream index.
// Equal (seed, stream) pairs always reproduce the same sequence, and
// distinct streams are statistically independent, so Monte-Carlo work can
// hand every task / sample / replicate its own derived stream and stay
// reproducible under any parallel schedule.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  // Child generator on a stream derived from (this->stream(), substream).
  // Deterministic; children with distinct substreams do not collide in
  // practice (64-bit mixed stream space).
  [[nodiscard]] Rng derive(std::uint64_t substream) const noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double next_double() noexcept;

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_gaussian() noexcept;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::uint32_t block_[4] = {0, 0, 0, 0};
  int block_pos_ = 4;  // 4 = block exhausted
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

// SplitMix64 finalizer; used for stream derivation and seeding helpers.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace clab
