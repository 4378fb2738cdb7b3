#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace pathwise::rng {

namespace detail {
inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}
}  // namespace detail

/// Philox 4x32-10 counter-based generator (Salmon et al., SC'11).
/// A pure function of (counter, key): every draw is addressable, so any
/// scheduling of work produces the same numbers.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::uint64_t key) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mul_hi_lo(kMulA, ctr[0], hi0, lo0);
    detail::mul_hi_lo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kWeylA;
    k1 += kWeylB;
  }
  return ctr;
}

inline std::uint64_t to_u64(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

/// Map 64 random bits to (0,1]; strictly positive so log() is safe.
inline double u64_to_open_unit(std::uint64_t u) {
  return static_cast<double>((u >> 11) + 1) * 0x1.0p-53;
}

/// Map 64 random bits to [0,1).
inline double u64_to_unit(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

struct GaussianPair {
  double z0;
  double z1;
};

/// Box-Muller on one 128-bit Philox block.
inline GaussianPair gaussian_pair(std::array<std::uint32_t, 4> ctr,
                                  std::uint64_t key) {
  const auto r = philox4x32(ctr, key);
  const double u1 = u64_to_open_unit(to_u64(r[0], r[1]));
  const double u2 = u64_to_unit(to_u64(r[2], r[3]));
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  return {mag * std::cos(ang), mag * std::sin(ang)};
}

/// Standard normal attached to one node of a seeded path tree. The draw is a
/// pure function of (seed, level, index, coord), never of generation order.
/// Counter-plane layout: node draws keep ctr[0] = level < 2^30 and
/// ctr[3] = coord < 2^30; the other streams below use values >= 2^30 in one
/// of those words, so the planes are disjoint.
inline double node_gaussian(std::uint64_t seed, std::uint32_t level,
                            std::uint64_t index, std::uint32_t coord) {
  const std::array<std::uint32_t, 4> ctr = {
      level, static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32), coord};
  return gaussian_pair(ctr, seed).z0;
}

enum : std::uint32_t {
  kStreamReplica = 0x40000001u,
  kStreamBlock = 0x40000002u,
  kStreamPartition = 0x40000003u,
  kStreamStart = 0x40000004u,
  kStreamSeedSweep = 0x40000005u,
};

/// Derive an independent 64-bit sub-seed, e.g. one per Monte Carlo replica.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                 std::uint32_t tag) {
  const auto r = philox4x32({tag, static_cast<std::uint32_t>(index),
                             static_cast<std::uint32_t>(index >> 32), 0x5EEDu},
                            seed);
  return to_u64(r[0], r[1]);
}

/// Addressable uniform in [0,1): slot/index identify the draw within a stream.
inline double uniform_at(std::uint64_t seed, std::uint64_t index,
                         std::uint32_t slot) {
  const auto r = philox4x32({slot, static_cast<std::uint32_t>(index),
                             static_cast<std::uint32_t>(index >> 32),
                             0x40000006u},
                            seed);
  return u64_to_unit(to_u64(r[0], r[1]));
}

}  // namespace pathwise::rng
