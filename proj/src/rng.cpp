#include "llns/rng.hpp"

#include <cmath>

namespace llns {

namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}
} // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& counter,
                                               const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> ctr = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, k);
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return ctr;
}

double uniform_open_closed(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

std::array<double, 2> normal_pair(const std::array<std::uint32_t, 4>& counter,
                                  const std::array<std::uint32_t, 2>& key) {
    const auto b = Philox4x32::block(counter, key);
    const double u1 = uniform_open_closed(b[0], b[1]);
    const double u2 = uniform_open_closed(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::array<std::uint32_t, 2> RngStream::key() const {
    const std::uint64_t mixed = splitmix64(seed ^ splitmix64(member + 0x632BE59BD9B4E019ull));
    return {static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
}

std::array<double, 2> RngStream::normals(std::uint32_t slot, std::uint32_t channel) const {
    const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(step),
                                              static_cast<std::uint32_t>(step >> 32), slot, channel};
    return normal_pair(ctr, key());
}

double RngStream::uniform(std::uint32_t slot, std::uint32_t channel) const {
    const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(step),
                                              static_cast<std::uint32_t>(step >> 32), slot, channel};
    const auto b = Philox4x32::block(ctr, key());
    return uniform_open_closed(b[0], b[1]);
}

} // namespace llns
