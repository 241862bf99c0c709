#include <cmath>
#include <vector>

#include "doctest.h"
#include "vf/rng.hpp"
#include "vf/simd/kernels.hpp"

using namespace vf;

namespace {
std::vector<double> randv(CounterRng& r, std::size_t n, double lo, double hi)
{
    std::vector<double> v(n);
    for (auto& x : v)
        x = lo + (hi - lo) * r.uniform();
    return v;
}
}  // namespace

TEST_CASE("reflect batch variants agree")
{
    if (!simd::avx2_available())
        return;
    CounterRng r(3);
    for (int dim : {2, 3})
    {
        std::size_t n = 1037;
        auto vx = randv(r, n, -3, 3), vy = randv(r, n, -3, 3), vz = randv(r, n, -3, 3);
        std::vector<double> nx(n), ny(n), nz(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            Vec u = r.unit_vector(dim);
            nx[i] = u[0];
            ny[i] = u[1];
            nz[i] = u[2];
        }
        auto ax = vx, ay = vy, az = vz;
        simd::scalar::reflect_batch(dim, n, vx.data(), vy.data(), vz.data(), nx.data(),
                                    ny.data(), nz.data());
        simd::avx2::reflect_batch(dim, n, ax.data(), ay.data(), az.data(), nx.data(),
                                  ny.data(), nz.data());
        for (std::size_t i = 0; i < n; ++i)
        {
            CHECK(std::abs(vx[i] - ax[i]) <= 1e-14 * 8);
            CHECK(std::abs(vy[i] - ay[i]) <= 1e-14 * 8);
            if (dim == 3)
                CHECK(std::abs(vz[i] - az[i]) <= 1e-14 * 8);
        }
    }
}

TEST_CASE("power sums, dots and gathers agree")
{
    if (!simd::avx2_available())
        return;
    CounterRng r(4);
    std::size_t n = 4099;
    auto px = randv(r, n, -2, 2), py = randv(r, n, -2, 2), pz = randv(r, n, -2, 2);
    auto w = randv(r, n, 0, 1);
    px[17] = 0.25;
    py[17] = -0.5;
    pz[17] = 0.125;
    double q[3] = {0.25, -0.5, 0.125};
    for (int dim : {2, 3})
    {
        for (double g : {1.0, 0.0, 2.0, 0.5, -1.0, -2.5})
        {
            double a = simd::scalar::weighted_power_sum(dim, n, px.data(), py.data(),
                                                        pz.data(), w.data(), q, g);
            double b = simd::avx2::weighted_power_sum(dim, n, px.data(), py.data(),
                                                      pz.data(), w.data(), q, g);
            CHECK(std::isfinite(a));
            CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
        }
    }
    auto a = randv(r, n, -1, 1), b = randv(r, n, -1, 1);
    double d1 = simd::scalar::dot(n, a.data(), b.data());
    double d2 = simd::avx2::dot(n, a.data(), b.data());
    CHECK(std::abs(d1 - d2) <= 1e-12 * n);
    std::vector<std::int32_t> idx(n);
    for (auto& i : idx)
        i = static_cast<std::int32_t>(r.next_u32() % n);
    double g1 = simd::scalar::gather_dot(n, a.data(), idx.data(), b.data());
    double g2 = simd::avx2::gather_dot(n, a.data(), idx.data(), b.data());
    CHECK(std::abs(g1 - g2) <= 1e-12 * n);
}

TEST_CASE("dispatcher reports a usable isa")
{
    auto isa = simd::active_isa();
    CHECK((isa == simd::Isa::scalar || simd::avx2_available()));
    double a[5] = {1, 2, 3, 4, 5};
    CHECK(simd::dot(5, a, a) == doctest::Approx(55));
}
