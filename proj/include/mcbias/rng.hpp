#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace mcbias {

/// Seedable, splittable random stream.
///
/// A stream is identified by a master seed plus a derivation path of 64-bit
/// indices (master_seed -> trial -> role). The path is folded into a 64-bit
/// key with the SplitMix64 finalizer, and the key seeds a xoshiro256**
/// generator. Draws therefore depend only on (master_seed, path), never on
/// the order in which sibling substreams are created or consumed.
///
/// Normal variates use the Marsaglia polar method; the method is part of the
/// reproducibility contract and must not change between releases.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t master_seed);

  /// Child stream at path() + {index}. Does not advance this stream.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal.
  double normal() noexcept;

 private:
  RngStream(std::uint64_t master_seed, std::vector<std::uint64_t> path, std::uint64_t key);
  void seed_state(std::uint64_t key) noexcept;

  std::uint64_t master_seed_;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 output finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace mcbias
