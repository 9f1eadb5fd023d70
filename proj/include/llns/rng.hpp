#pragma once

#include <array>
#include <cstdint>

namespace llns {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Stateless: output is a pure function of (key, counter), which is what makes
// ensemble members, restarts and per-mode noise draws reproducible without
// storing any stream state.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);
};

// Uniform in (0,1], 53-bit, from two 32-bit words.
double uniform_open_closed(std::uint32_t hi, std::uint32_t lo);

// Two standard normals via Box-Muller from one Philox block.
std::array<double, 2> normal_pair(const std::array<std::uint32_t, 4>& counter,
                                  const std::array<std::uint32_t, 2>& key);

// A logical stream: (seed, member, step) select the key/counter prefix; the
// per-draw indices (slot, channel) fill the rest of the counter. Identical
// fields reproduce identical draws bit-for-bit.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t member = 0;
    std::uint64_t step = 0;

    std::array<std::uint32_t, 2> key() const;
    std::array<double, 2> normals(std::uint32_t slot, std::uint32_t channel) const;
    double uniform(std::uint32_t slot, std::uint32_t channel) const;

    RngStream at_step(std::uint64_t s) const { return RngStream{seed, member, s}; }
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace llns
