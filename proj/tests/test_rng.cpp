#include <cmath>
#include <set>

#include "doctest.h"
#include "vf/rng.hpp"

using namespace vf;

TEST_CASE("philox known-answer vectors")
{
    auto r0 = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(r0[0] == 0x6627e8d5u);
    CHECK(r0[1] == 0xe169c58du);
    CHECK(r0[2] == 0xbc57ac4cu);
    CHECK(r0[3] == 0x9b00dbd8u);
    auto r1 = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
    CHECK(r1[0] == 0x408f276du);
    CHECK(r1[1] == 0x41c83b0eu);
    CHECK(r1[2] == 0xa20bc7c6u);
    CHECK(r1[3] == 0x6d5451fdu);
    auto r2 = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u});
    CHECK(r2[0] == 0xd16cfe09u);
    CHECK(r2[1] == 0x94fdccebu);
    CHECK(r2[2] == 0x5001e420u);
    CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and distinct")
{
    CounterRng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i)
    {
        double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(CounterRng(42, 7).next_u64() != c.next_u64());
    auto s1 = CounterRng(1).split(3), s2 = CounterRng(1).split(3);
    CHECK(s1.next_u64() == s2.next_u64());
    CHECK(CounterRng(1).split(3).key() != CounterRng(1).split(4).key());
}

TEST_CASE("uniform and sphere moments")
{
    CounterRng r(99);
    int const n = 200000;
    double m = 0, m2 = 0;
    for (int i = 0; i < n; ++i)
    {
        double u = r.uniform();
        m += u;
        m2 += u * u;
    }
    CHECK(m / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(m2 / n == doctest::Approx(1.0 / 3).epsilon(0.01));
    double zz = 0;
    for (int i = 0; i < n; ++i)
    {
        Vec u = r.unit_vector(3);
        CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-14));
        zz += u[2] * u[2];
    }
    CHECK(zz / n == doctest::Approx(1.0 / 3).epsilon(0.01));
}
