#include "doctest.h"

#include <array>
#include <set>
#include <vector>

#include "model/rng.hpp"

using namespace rbsing;

TEST_CASE("philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter rng is a pure function of seed and position") {
    const RngSeed seed{42, 7};
    CounterRng a(seed), b(seed);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CounterRng c(seed);
    CHECK(c.at(57) == CounterRng(seed, 57).next_u64());
    CHECK(CounterRng({42, 8}).at(0) != CounterRng(seed).at(0));
    CHECK(CounterRng({43, 7}).at(0) != CounterRng(seed).at(0));
}

TEST_CASE("derived streams are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 0; tag < 8; ++tag)
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_stream(tag, i));
    CHECK(seen.size() == 8000);
}

TEST_CASE("bounded draws") {
    CounterRng rng({1, 2});
    std::vector<int> counts(6, 0);
    for (int i = 0; i < 60000; ++i) {
        const auto v = rng.next_below(6);
        REQUIRE(v < 6);
        ++counts[v];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.next_in(-3, 3);
        CHECK(v >= -3);
        CHECK(v <= 3);
    }
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK_THROWS(rng.next_below(0));
    CHECK_THROWS(rng.next_in(2, 1));
}
