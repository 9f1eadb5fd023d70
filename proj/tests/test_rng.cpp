#include "llns/rng.hpp"

#include "doctest.h"

#include <cmath>
#include <set>

using namespace llns;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Published test vectors for Philox4x32, 10 rounds.
    auto r0 = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r0[0] == 0x6627e8d5u);
    CHECK(r0[1] == 0xe169c58du);
    CHECK(r0[2] == 0xbc57ac4cu);
    CHECK(r0[3] == 0x9b00dbd8u);

    auto r1 = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(r1[0] == 0x408f276du);
    CHECK(r1[1] == 0x41c83b0eu);
    CHECK(r1[2] == 0xa20bc7c6u);
    CHECK(r1[3] == 0x6d5451fdu);

    auto r2 = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(r2[0] == 0xd16cfe09u);
    CHECK(r2[1] == 0x94fdccebu);
    CHECK(r2[2] == 0x5001e420u);
    CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("streams are deterministic and distinct") {
    RngStream a{42, 7, 1000};
    RngStream b{42, 7, 1000};
    auto ga = a.normals(3, 1);
    auto gb = b.normals(3, 1);
    CHECK(ga[0] == gb[0]);
    CHECK(ga[1] == gb[1]);

    RngStream c{42, 8, 1000};
    auto gc = c.normals(3, 1);
    CHECK(ga[0] != gc[0]);

    auto gd = a.at_step(1001).normals(3, 1);
    CHECK(ga[0] != gd[0]);
}

TEST_CASE("normals have unit variance and zero mean") {
    RngStream s{123, 0, 0};
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto g = s.normals(static_cast<std::uint32_t>(i), 0);
        sum += g[0] + g[1];
        sum2 += g[0] * g[0] + g[1] * g[1];
    }
    const double mean = sum / (2.0 * n);
    const double var = sum2 / (2.0 * n) - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(2.0 * n));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / (2.0 * n)));
}

TEST_CASE("uniform covers (0,1]") {
    RngStream s{9, 0, 0};
    for (int i = 0; i < 1000; ++i) {
        double u = s.uniform(static_cast<std::uint32_t>(i), 0);
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}
