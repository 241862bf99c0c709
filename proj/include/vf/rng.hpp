// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "vf/vec.hpp"

namespace vf {

//! Philox4x32-10 block function.
std::array<std::uint32_t, 4>
philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

//! SplitMix64 finalizer, used to derive stream keys.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/*!
 * Counter-based generator: a (seed, stream) pair fixes the key, draws walk a
 * 64-bit counter. Streams are independent of the order in which they are
 * consumed, so work split across threads reproduces the serial result.
 */
class CounterRng
{
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    //! Child generator for a sub-stream
    CounterRng split(std::uint64_t sub) const;

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    //! Uniform in [0, 1) with 53 random bits
    double uniform();
    //! Uniform in (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }
    double normal();
    //! Uniform direction on the unit sphere of dimension d-1
    Vec unit_vector(int d);
    //! Uniform point in the ball B(0, r) of R^d
    Vec in_ball(int d, double r);

    std::uint64_t key() const { return key_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int avail_ = 0;
    bool has_spare_ = false;
    double spare_ = 0;
};

}  // namespace vf
