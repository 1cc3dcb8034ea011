#include "mcbias/rng.hpp"

#include <cmath>

namespace mcbias {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSeedSalt = 0x6A09E667F3BCC909ULL;
constexpr std::uint64_t kPathSalt = 0xBB67AE8584CAA73BULL;

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed)
    : RngStream(master_seed, {}, mix64(master_seed ^ kSeedSalt)) {}

RngStream::RngStream(std::uint64_t master_seed, std::vector<std::uint64_t> path,
                     std::uint64_t key)
    : master_seed_(master_seed), path_(std::move(path)), key_(key) {
  seed_state(key_);
}

RngStream RngStream::substream(std::uint64_t index) const {
  auto path = path_;
  path.push_back(index);
  const std::uint64_t child = mix64(key_ + kGolden * (mix64(index ^ kPathSalt) | 1ULL));
  return RngStream(master_seed_, std::move(path), child);
}

void RngStream::seed_state(std::uint64_t key) noexcept {
  std::uint64_t sm = key;
  for (auto& s : state_) {
    sm += kGolden;
    s = mix64(sm);
  }
}

RngStream::result_type RngStream::operator()() noexcept {
  // xoshiro256**
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * m;
  has_spare_ = true;
  return u * m;
}

}  // namespace mcbias
