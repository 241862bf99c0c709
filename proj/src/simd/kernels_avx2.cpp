// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <immintrin.h>

#include "vf/simd/kernels.hpp"

namespace vf::simd::avx2 {
namespace {
inline double hsum(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}
}  // namespace

void reflect_batch(int dim, std::size_t n, double* vx, double* vy, double* vz,
                   const double* nx, const double* ny, const double* nz)
{
    std::size_t i = 0;
    __m256d const two = _mm256_set1_pd(2.0);
    for (; i + 4 <= n; i += 4)
    {
        __m256d ax = _mm256_loadu_pd(vx + i), ay = _mm256_loadu_pd(vy + i);
        __m256d bx = _mm256_loadu_pd(nx + i), by = _mm256_loadu_pd(ny + i);
        __m256d d = _mm256_fmadd_pd(ay, by, _mm256_mul_pd(ax, bx));
        __m256d az, bz;
        if (dim == 3)
        {
            az = _mm256_loadu_pd(vz + i);
            bz = _mm256_loadu_pd(nz + i);
            d = _mm256_fmadd_pd(az, bz, d);
        }
        __m256d f = _mm256_mul_pd(two, d);
        _mm256_storeu_pd(vx + i, _mm256_fnmadd_pd(f, bx, ax));
        _mm256_storeu_pd(vy + i, _mm256_fnmadd_pd(f, by, ay));
        if (dim == 3)
            _mm256_storeu_pd(vz + i, _mm256_fnmadd_pd(f, bz, az));
    }
    scalar::reflect_batch(dim, n - i, vx + i, vy + i, dim == 3 ? vz + i : vz,
                          nx + i, ny + i, dim == 3 ? nz + i : nz);
}

double weighted_power_sum(int dim, std::size_t n, const double* px,
                          const double* py, const double* pz, const double* w,
                          const double q[3], double gamma)
{
    bool const fast = (gamma == 1.0 || gamma == 0.0 || gamma == 2.0);
    __m256d const qx = _mm256_set1_pd(q[0]), qy = _mm256_set1_pd(q[1]);
    __m256d const qz = _mm256_set1_pd(q[2]);
    __m256d acc = _mm256_setzero_pd();
    double tail = 0;
    double const half = 0.5 * gamma;
    std::size_t j = 0;
    alignas(32) double r2buf[4];
    for (; j + 4 <= n; j += 4)
    {
        __m256d dx = _mm256_sub_pd(qx, _mm256_loadu_pd(px + j));
        __m256d dy = _mm256_sub_pd(qy, _mm256_loadu_pd(py + j));
        __m256d r2 = _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx));
        if (dim == 3)
        {
            __m256d dz = _mm256_sub_pd(qz, _mm256_loadu_pd(pz + j));
            r2 = _mm256_fmadd_pd(dz, dz, r2);
        }
        __m256d wv = _mm256_loadu_pd(w + j);
        if (fast)
        {
            __m256d phi = gamma == 1.0   ? _mm256_sqrt_pd(r2)
                          : gamma == 2.0 ? r2
                                         : _mm256_set1_pd(1.0);
            acc = _mm256_fmadd_pd(wv, phi, acc);
        }
        else
        {
            _mm256_store_pd(r2buf, r2);
            for (int l = 0; l < 4; ++l)
            {
                if (r2buf[l] == 0.0 && gamma < 0)
                    continue;
                tail += w[j + l] * std::pow(r2buf[l], half);
            }
        }
    }
    return hsum(acc) + tail
           + scalar::weighted_power_sum(dim, n - j, px + j, py + j,
                                        dim == 3 ? pz + j : pz, w + j, q, gamma);
}

double dot(std::size_t n, const double* a, const double* b)
{
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
    {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                             a1);
    }
    return hsum(_mm256_add_pd(a0, a1)) + scalar::dot(n - i, a + i, b + i);
}

double gather_dot(std::size_t n, const double* coef, const std::int32_t* idx,
                  const double* table)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
    {
        __m128i iv = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        __m256d tv = _mm256_i32gather_pd(table, iv, 8);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(coef + i), tv, acc);
    }
    return hsum(acc) + scalar::gather_dot(n - i, coef + i, idx + i, table);
}

}  // namespace vf::simd::avx2
