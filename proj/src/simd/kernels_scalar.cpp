// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "vf/simd/kernels.hpp"

namespace vf::simd::scalar {

void reflect_batch(int dim, std::size_t n, double* vx, double* vy, double* vz,
                   const double* nx, const double* ny, const double* nz)
{
    for (std::size_t i = 0; i < n; ++i)
    {
        double d = vx[i] * nx[i] + vy[i] * ny[i];
        if (dim == 3)
            d += vz[i] * nz[i];
        double f = 2 * d;
        vx[i] -= f * nx[i];
        vy[i] -= f * ny[i];
        if (dim == 3)
            vz[i] -= f * nz[i];
    }
}

double weighted_power_sum(int dim, std::size_t n, const double* px,
                          const double* py, const double* pz, const double* w,
                          const double q[3], double gamma)
{
    double sum = 0;
    double const half = 0.5 * gamma;
    for (std::size_t j = 0; j < n; ++j)
    {
        double dx = q[0] - px[j], dy = q[1] - py[j];
        double r2 = dx * dx + dy * dy;
        if (dim == 3)
        {
            double dz = q[2] - pz[j];
            r2 += dz * dz;
        }
        double phi;
        if (gamma == 1.0)
            phi = std::sqrt(r2);
        else if (gamma == 0.0)
            phi = 1.0;
        else if (gamma == 2.0)
            phi = r2;
        else if (r2 == 0.0 && gamma < 0)
            continue;
        else
            phi = std::pow(r2, half);
        sum += w[j] * phi;
    }
    return sum;
}

double dot(std::size_t n, const double* a, const double* b)
{
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double gather_dot(std::size_t n, const double* coef, const std::int32_t* idx,
                  const double* table)
{
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
        s += coef[i] * table[idx[i]];
    return s;
}

}  // namespace vf::simd::scalar
