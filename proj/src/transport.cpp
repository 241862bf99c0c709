// SPDX-License-Identifier: Apache-2.0
#include "vf/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vf/error.hpp"
#include "vf/parallel.hpp"
#include "vf/quadrature.hpp"

namespace vf {
namespace {
constexpr double kPi = std::numbers::pi;
}

void PhaseField::sample(std::vector<Vec> x_nodes, std::vector<Vec> v_nodes)
{
    xs = std::move(x_nodes);
    vs = std::move(v_nodes);
    values.resize(xs.size() * vs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j)
            values[i * vs.size() + j] = eval(xs[i], vs[j]);
}

double PhaseField::sample_mismatch() const
{
    double m = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j)
            m = std::max(m, std::abs(values[i * vs.size() + j] - eval(xs[i], vs[j])));
    return m;
}

double bump(double r)
{
    if (r >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

PhaseField gaussian_field(Vec x0, double sx, Vec v0, double sv)
{
    PhaseField f;
    f.eval = [=](const Vec& x, const Vec& v) {
        return std::exp(-norm2(x - x0) / (2 * sx * sx) - norm2(v - v0) / (2 * sv * sv));
    };
    return f;
}

PhaseField bump_field(Vec x0, double rx, Vec v0, double rv)
{
    PhaseField f;
    f.eval = [=](const Vec& x, const Vec& v) {
        return bump(norm(x - x0) / rx) * bump(norm(v - v0) / rv);
    };
    return f;
}

PhaseField indicator_field(Vec x0, double rx, Vec v0, double rv)
{
    PhaseField f;
    f.eval = [=](const Vec& x, const Vec& v) {
        return (norm(x - x0) < rx && norm(v - v0) < rv) ? 1.0 : 0.0;
    };
    return f;
}

PhaseField polynomial_field(double a, double b, double c)
{
    PhaseField f;
    f.eval = [=](const Vec& x, const Vec& v) { return a + b * x[0] + c * norm2(v); };
    return f;
}

PointValue evolve_pointwise(const ConvexDomain& dom, const PhaseField& u0, double t,
                            const Vec& x, const Vec& v, int max_rebounds)
{
    VF_REQUIRE(t >= 0, invalid_argument, "time must be nonnegative");
    PointValue pv;
    if (t == 0)
    {
        pv.value = u0(x, v);
        return pv;
    }
    if (dom.is_torus())
    {
        pv.value = u0(dom.wrap(x - v * t), v);
        return pv;
    }
    if (norm2(v) == 0)
    {
        pv.value = u0(x, v);
        return pv;
    }
    TrajectoryResolution fr = final_rebound(dom, t, x, v, max_rebounds);
    Vec foot = fr.x_fin - fr.v_fin * (t - fr.t_fin);
    pv.value = u0(foot, fr.v_fin);
    pv.truncated = fr.truncated;
    return pv;
}

Nodes spatial_nodes(const ConvexDomain& dom, int n)
{
    VF_REQUIRE(n >= 2, invalid_argument, "need at least two spatial nodes");
    Nodes out;
    int const d = dom.dim();
    if (dom.is_torus())
    {
        // Midpoint rule on the period box (spectral for periodic data).
        Vec L = dom.axes();
        double cell = 1;
        for (int i = 0; i < d; ++i)
            cell *= L[i] / n;
        int const nz = d == 3 ? n : 1;
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                {
                    Vec x{(i + 0.5) * L[0] / n, (j + 0.5) * L[1] / n,
                          d == 3 ? (k + 0.5) * L[2] / n : 0.0};
                    out.pts.push_back(x);
                    out.w.push_back(cell);
                }
        return out;
    }
    // Star-shaped map x = c + s R(u) u, Gauss-Legendre in s.
    auto gl = gauss_legendre(n, 0.0, 1.0);
    Vec const c = dom.center();
    if (d == 2)
    {
        for (int j = 0; j < n; ++j)
        {
            double phi = 2 * kPi * (j + 0.5) / n;
            Vec u{std::cos(phi), std::sin(phi)};
            double R = dom.chord_end(c, u);
            for (int i = 0; i < n; ++i)
            {
                double s = gl.x[i];
                out.pts.push_back(c + u * (s * R));
                out.w.push_back(gl.w[i] * (2 * kPi / n) * s * R * R);
            }
        }
        return out;
    }
    auto glc = gauss_legendre(n, -1.0, 1.0);
    for (int k = 0; k < n; ++k)
    {
        double ct = glc.x[k], st = std::sqrt(1 - ct * ct);
        for (int j = 0; j < 2 * n; ++j)
        {
            double phi = 2 * kPi * (j + 0.5) / (2 * n);
            Vec u{st * std::cos(phi), st * std::sin(phi), ct};
            double R = dom.chord_end(c, u);
            for (int i = 0; i < n; ++i)
            {
                double s = gl.x[i];
                out.pts.push_back(c + u * (s * R));
                out.w.push_back(gl.w[i] * glc.w[k] * (2 * kPi / (2 * n)) * s * s * R * R * R);
            }
        }
    }
    return out;
}

Nodes velocity_nodes(int dim, int n, double rv)
{
    VF_REQUIRE(n >= 2 && rv > 0, invalid_argument, "bad velocity rule");
    Nodes out;
    auto gl = gauss_legendre(n, 0.0, rv);
    if (dim == 2)
    {
        for (int j = 0; j < n; ++j)
        {
            double a = 2 * kPi * (j + 0.5) / n;
            for (int i = 0; i < n; ++i)
            {
                out.pts.push_back(Vec(std::cos(a), std::sin(a)) * gl.x[i]);
                out.w.push_back(gl.w[i] * gl.x[i] * 2 * kPi / n);
            }
        }
        return out;
    }
    auto glc = gauss_legendre(n, -1.0, 1.0);
    for (int k = 0; k < n; ++k)
    {
        double ct = glc.x[k], st = std::sqrt(1 - ct * ct);
        for (int j = 0; j < 2 * n; ++j)
        {
            double a = 2 * kPi * (j + 0.5) / (2 * n);
            for (int i = 0; i < n; ++i)
            {
                out.pts.push_back(Vec(st * std::cos(a), st * std::sin(a), ct) * gl.x[i]);
                out.w.push_back(gl.w[i] * glc.w[k] * gl.x[i] * gl.x[i] * 2 * kPi / (2 * n));
            }
        }
    }
    return out;
}

double l2_squared(const ConvexDomain& dom, const PhaseField& u0, double t,
                  const Nodes& xn, const Nodes& vn, int max_rebounds, int* truncated)
{
    std::size_t const nx = xn.pts.size();
    std::size_t const chunk = 64;
    std::size_t const nchunks = (nx + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
    std::vector<int> trunc(nchunks, 0);
    parallel_chunks(nchunks, [&](std::size_t c) {
        double acc = 0;
        for (std::size_t i = c * chunk; i < std::min(nx, (c + 1) * chunk); ++i)
        {
            double row = 0;
            for (std::size_t j = 0; j < vn.pts.size(); ++j)
            {
                auto pv = evolve_pointwise(dom, u0, t, xn.pts[i], vn.pts[j], max_rebounds);
                trunc[c] += pv.truncated;
                row += vn.w[j] * pv.value * pv.value;
            }
            acc += xn.w[i] * row;
        }
        partial[c] = acc;
    });
    double sum = 0;
    int tr = 0;
    for (std::size_t c = 0; c < nchunks; ++c)
    {
        sum += partial[c];
        tr += trunc[c];
    }
    if (truncated)
        *truncated = tr;
    return sum;
}

L2Report l2_report(const ConvexDomain& dom, const PhaseField& u0,
                   const std::vector<double>& times, const QuadratureSpec& spec)
{
    VF_REQUIRE(!times.empty(), invalid_argument, "no report times");
    for (double t : times)
        VF_REQUIRE(t >= 0, invalid_argument, "report times must be nonnegative");
    Nodes xn = spatial_nodes(dom, spec.nx);
    Nodes vn = velocity_nodes(dom.dim(), spec.nv, spec.rv);
    L2Report rep;
    for (double t : times)
    {
        L2Entry e;
        e.t = t;
        e.l2 = l2_squared(dom, u0, t, xn, vn, spec.max_rebounds, &e.truncated);
        rep.entries.push_back(e);
    }
    double const ref = rep.entries.front().l2;
    for (auto& e : rep.entries)
    {
        e.drift = ref > 0 ? std::abs(e.l2 - ref) / ref : std::abs(e.l2 - ref);
        rep.max_drift = std::max(rep.max_drift, e.drift);
    }
    if (std::isfinite(spec.tol) && spec.nx >= 4 && spec.nv >= 4)
    {
        Nodes xh = spatial_nodes(dom, spec.nx / 2);
        Nodes vh = velocity_nodes(dom.dim(), spec.nv / 2, spec.rv);
        for (auto const& e : rep.entries)
        {
            double coarse = l2_squared(dom, u0, e.t, xh, vh, spec.max_rebounds);
            double gap = std::abs(coarse - e.l2) / (ref > 0 ? ref : 1.0);
            rep.error_estimate = std::max(rep.error_estimate, gap);
        }
        if (rep.error_estimate > spec.tol)
            throw Error(Errc::quadrature_too_coarse,
                        "estimated quadrature error " + std::to_string(rep.error_estimate)
                            + " exceeds tolerance");
    }
    return rep;
}

}  // namespace vf
