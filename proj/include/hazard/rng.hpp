#pragma once

#include <cstdint>
#include <random>

namespace hazard {

// Named substreams derived from one master seed. Each purpose gets an
// independent generator so that, e.g., a different solver budget leaves the
// sensor noise sequence untouched.
enum class StreamPurpose : std::uint32_t {
  init = 1,
  noise = 2,
  solver = 3,
  baseline = 4,
};

class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rng(std::uint64_t master_seed, StreamPurpose purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(purpose), 0x68617a64u};
    engine_.seed(seq);
  }

  // Uniform on [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double standard_normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  // Uniform integer on [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::uint64_t next_u64() { return engine_(); }

  engine_type& engine() noexcept { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace hazard
