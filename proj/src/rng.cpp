// SPDX-License-Identifier: Apache-2.0
#include "vf/rng.hpp"

#include <cmath>
#include <numbers>

namespace vf {
namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo)
{
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace

std::array<std::uint32_t, 4>
philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k)
{
    for (int round = 0; round < 10; ++round)
    {
        if (round > 0)
        {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ull)))
{
}

CounterRng CounterRng::split(std::uint64_t sub) const
{
    CounterRng child(0, 0);
    child.key_ = splitmix64(key_ ^ splitmix64(sub + 0x632BE59BD9B4E019ull));
    return child;
}

std::uint32_t CounterRng::next_u32()
{
    if (avail_ == 0)
    {
        std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(counter_),
            static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
        buf_ = philox4x32(ctr,
                          {static_cast<std::uint32_t>(key_),
                           static_cast<std::uint32_t>(key_ >> 32)});
        ++counter_;
        avail_ = 4;
    }
    return buf_[4 - avail_--];
}

std::uint64_t CounterRng::next_u64()
{
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double CounterRng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

Vec CounterRng::unit_vector(int d)
{
    if (d == 2)
    {
        double a = 2.0 * std::numbers::pi * uniform();
        return {std::cos(a), std::sin(a), 0.0};
    }
    double z = 2.0 * uniform() - 1.0;
    double a = 2.0 * std::numbers::pi * uniform();
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(a), s * std::sin(a), z};
}

Vec CounterRng::in_ball(int d, double r)
{
    double rad = r * std::pow(uniform(), 1.0 / d);
    return unit_vector(d) * rad;
}

}  // namespace vf
