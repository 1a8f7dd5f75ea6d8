#pragma once

#include <cstdint>

namespace rpcs {

// Mixes a base seed with a stream index (splitmix64 finalizer). Used to derive
// per-replication seeds so replication r's draws never depend on how many
// replications ran before it or on scheduling order.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) noexcept;

// PCG32 (O'Neill's pcg32_random_r) plus the double/normal/exponential/t draws
// the generators need. Self-contained so every byte of the stream is owned by
// this file; reproducibility across platforms matters more here than raw
// throughput.
class Pcg32 {
public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint32_t next_u32() noexcept;

  // Uniform on [0,1) with 53 random bits.
  double next_double() noexcept;

  // Standard normal via the Marsaglia polar method; caches the spare draw.
  double next_normal() noexcept;

  // Exponential with rate 1 (mean 1), always >= 0.
  double next_exponential() noexcept;

  // Student t with 20 degrees of freedom, scaled to unit variance.
  double next_t20_unit_variance() noexcept;

private:
  std::uint64_t state_;
  std::uint64_t inc_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rpcs
