#include <doctest.h>

#include <cmath>
#include <set>

#include "fieldtail/rng.hpp"

using namespace fieldtail;

TEST_SUITE("rng") {

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    PhiloxStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint32_t> seen;
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u32();
        CHECK(va == b.next_u32());
        differs_c |= va != c.next_u32();
        differs_d |= va != d.next_u32();
        seen.insert(va);
    }
    CHECK(differs_c);
    CHECK(differs_d);
    CHECK(seen.size() == 64);
}

TEST_CASE("uniform and normal moments") {
    PhiloxStream s(5, 0);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        su += u;
        su2 += u * u;
        const double z = s.next_normal();
        sn += z;
        sn2 += z * z;
    }
    // Five standard errors.
    CHECK(std::abs(su / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(su2 / n - 1.0 / 3) < 5 * std::sqrt(4.0 / 45 / n));
    CHECK(std::abs(sn / n) < 5 / std::sqrt(double(n)));
    CHECK(std::abs(sn2 / n - 1.0) < 5 * std::sqrt(2.0 / n));
}

}  // TEST_SUITE
