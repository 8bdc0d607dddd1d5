#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace vortexmf {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). A pure function of (counter, key): any
// consumer may query any (stream, position) without shared state, which is
// what makes the common-noise coupling across simulations cheap.

struct PhiloxCounter {
  std::uint32_t c0{0}, c1{0}, c2{0}, c3{0};
};

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(PhiloxCounter ctr,
                                               std::uint64_t key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::uint32_t x0 = ctr.c0, x1 = ctr.c1, x2 = ctr.c2, x3 = ctr.c3;

  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mulhilo32(kMul0, x0, hi0, lo0);
    detail::mulhilo32(kMul1, x2, hi1, lo1);
    const std::uint32_t y0 = hi1 ^ x1 ^ k0;
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x3 ^ k1;
    const std::uint32_t y3 = lo0;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {x0, x1, x2, x3};
}

/// One standard normal deviate from counter (stream, index) under `key`.
/// Box-Muller on the four 32-bit words; deterministic for fixed inputs.
inline double philox_normal(std::uint64_t key, std::uint32_t stream,
                            std::uint64_t index) {
  PhiloxCounter ctr;
  ctr.c0 = static_cast<std::uint32_t>(index);
  ctr.c1 = static_cast<std::uint32_t>(index >> 32);
  ctr.c2 = stream;
  ctr.c3 = 0x564D4620u;  // domain tag
  const auto w = philox4x32(ctr, key);
  const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

/// Uniform deviate in [0, 1) from counter (stream, index) under `key`.
inline double philox_uniform(std::uint64_t key, std::uint32_t stream,
                             std::uint64_t index) {
  PhiloxCounter ctr;
  ctr.c0 = static_cast<std::uint32_t>(index);
  ctr.c1 = static_cast<std::uint32_t>(index >> 32);
  ctr.c2 = stream;
  ctr.c3 = 0x564D5520u;  // distinct domain tag from the normal stream
  const auto w = philox4x32(ctr, key);
  const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  return static_cast<double>(a >> 11) * 0x1.0p-53;
}

}  // namespace vortexmf
