// SPDX-License-Identifier: Apache-2.0
#include "vf/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace vf {

Rule gauss_legendre(int n, double a, double b)
{
    static std::mutex m;
    static std::map<int, Rule> cache;
    Rule ref;
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find(n);
        if (it != cache.end())
            ref = it->second;
    }
    if (ref.x.empty())
    {
        ref.x.resize(n);
        ref.w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i)
        {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1, p1 = 0;
                for (int k = 1; k <= n; ++k)
                {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
                }
                dp = n * (z * p0 - p1) / (z * z - 1);
                double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16)
                    break;
            }
            double p0 = 1, p1 = 0;
            for (int k = 1; k <= n; ++k)
            {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1);
            double w = 2 / ((1 - z * z) * dp * dp);
            ref.x[i] = -z;
            ref.x[n - 1 - i] = z;
            ref.w[i] = w;
            ref.w[n - 1 - i] = w;
        }
        std::lock_guard<std::mutex> lock(m);
        cache[n] = ref;
    }
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int i = 0; i < n; ++i)
    {
        r.x[i] = c + h * ref.x[i];
        r.w[i] = h * ref.w[i];
    }
    return r;
}

}  // namespace vf
