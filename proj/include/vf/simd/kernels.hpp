// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

namespace vf::simd {

enum class Isa
{
    scalar,
    avx2,
};

const char* to_string(Isa isa);
//! Whether this build and CPU can run the AVX2 variants
bool avx2_available();
//! Selected once per process; VF_SIMD=scalar forces the reference path
Isa active_isa();

/*!
 * Batch specular reflection on SoA velocity arrays, v <- v - 2 (v.n) n.
 * For dim == 2 the z pointers are ignored.
 */
void reflect_batch(int dim, std::size_t n, double* vx, double* vy, double* vz,
                   const double* nx, const double* ny, const double* nz);

/*!
 * sum_j w_j |q - p_j|^gamma over SoA points. Zero-distance terms are skipped
 * when gamma < 0.
 */
double weighted_power_sum(int dim, std::size_t n, const double* px,
                          const double* py, const double* pz, const double* w,
                          const double q[3], double gamma);

double dot(std::size_t n, const double* a, const double* b);

//! sum_j coef[j] * table[idx[j]]
double gather_dot(std::size_t n, const double* coef, const std::int32_t* idx,
                  const double* table);

#define VF_SIMD_DECLARE_VARIANT(NS)                                            \
    namespace NS {                                                             \
    void reflect_batch(int dim, std::size_t n, double* vx, double* vy,         \
                       double* vz, const double* nx, const double* ny,         \
                       const double* nz);                                      \
    double weighted_power_sum(int dim, std::size_t n, const double* px,        \
                              const double* py, const double* pz,              \
                              const double* w, const double q[3],              \
                              double gamma);                                   \
    double dot(std::size_t n, const double* a, const double* b);               \
    double gather_dot(std::size_t n, const double* coef,                       \
                      const std::int32_t* idx, const double* table);           \
    }

VF_SIMD_DECLARE_VARIANT(scalar)
VF_SIMD_DECLARE_VARIANT(avx2)

#undef VF_SIMD_DECLARE_VARIANT

}  // namespace vf::simd
