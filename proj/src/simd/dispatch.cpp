// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <cstring>

#include "vf/simd/kernels.hpp"

namespace vf::simd {

const char* to_string(Isa isa)
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool avx2_available()
{
#if defined(VF_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa()
{
    static Isa const isa = [] {
        if (const char* env = std::getenv("VF_SIMD"))
        {
            if (std::strcmp(env, "scalar") == 0)
                return Isa::scalar;
        }
        return avx2_available() ? Isa::avx2 : Isa::scalar;
    }();
    return isa;
}

#if !defined(VF_BUILD_AVX2)
// Stubs keep the symbol set complete; never selected at runtime.
namespace avx2 {
void reflect_batch(int dim, std::size_t n, double* vx, double* vy, double* vz,
                   const double* nx, const double* ny, const double* nz)
{
    scalar::reflect_batch(dim, n, vx, vy, vz, nx, ny, nz);
}
double weighted_power_sum(int dim, std::size_t n, const double* px,
                          const double* py, const double* pz, const double* w,
                          const double q[3], double gamma)
{
    return scalar::weighted_power_sum(dim, n, px, py, pz, w, q, gamma);
}
double dot(std::size_t n, const double* a, const double* b)
{
    return scalar::dot(n, a, b);
}
double gather_dot(std::size_t n, const double* coef, const std::int32_t* idx,
                  const double* table)
{
    return scalar::gather_dot(n, coef, idx, table);
}
}  // namespace avx2
#endif

void reflect_batch(int dim, std::size_t n, double* vx, double* vy, double* vz,
                   const double* nx, const double* ny, const double* nz)
{
    if (active_isa() == Isa::avx2)
        return avx2::reflect_batch(dim, n, vx, vy, vz, nx, ny, nz);
    scalar::reflect_batch(dim, n, vx, vy, vz, nx, ny, nz);
}

double weighted_power_sum(int dim, std::size_t n, const double* px,
                          const double* py, const double* pz, const double* w,
                          const double q[3], double gamma)
{
    if (active_isa() == Isa::avx2)
        return avx2::weighted_power_sum(dim, n, px, py, pz, w, q, gamma);
    return scalar::weighted_power_sum(dim, n, px, py, pz, w, q, gamma);
}

double dot(std::size_t n, const double* a, const double* b)
{
    if (active_isa() == Isa::avx2)
        return avx2::dot(n, a, b);
    return scalar::dot(n, a, b);
}

double gather_dot(std::size_t n, const double* coef, const std::int32_t* idx,
                  const double* table)
{
    if (active_isa() == Isa::avx2)
        return avx2::gather_dot(n, coef, idx, table);
    return scalar::gather_dot(n, coef, idx, table);
}

}  // namespace vf::simd
