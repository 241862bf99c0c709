// SPDX-License-Identifier: Apache-2.0
#include "vf/grazing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vf/error.hpp"
#include "vf/rng.hpp"

namespace vf {

namespace {

constexpr double pi = std::numbers::pi;
const double inv_phi = (std::sqrt(5.0) - 1) / 2;

template <class F>
double golden_max(F f, double a, double b, int iters, double* arg = nullptr)
{
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i)
    {
        if (fc >= fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double best = std::max(fc, fd);
    if (arg)
        *arg = fc >= fd ? c : d;
    return best;
}

// Unit tangent directions at a boundary point with normal n
std::vector<Vec> tangents(const Vec& n, int dim, int azimuths)
{
    if (dim == 2)
        return {Vec(-n[1], n[0]), Vec(n[1], -n[0])};
    Vec a = std::abs(n[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
    Vec e1 = normalized(cross(n, a));
    Vec e2 = cross(n, e1);
    std::vector<Vec> out;
    for (int k = 0; k < azimuths; ++k)
    {
        double phi = 2 * pi * k / azimuths;
        out.push_back(std::cos(phi) * e1 + std::sin(phi) * e2);
    }
    return out;
}

Vec inward(const Vec& n, const Vec& w, double psi)
{
    return -std::cos(psi) * n + std::sin(psi) * w;
}

// Depth of the full chord leaving boundary point x along v
double full_chord_depth(const ConvexDomain& dom, const Vec& x, const Vec& v)
{
    double s = dom.chord_end(x, v);
    if (!(s > 0) || !std::isfinite(s))
        return 0;
    return chord_depth(dom, x, v, s);
}

// Smallest feasible tangency angle along w, returned as cos psi
double side_h(const ConvexDomain& dom, const Vec& x, const Vec& n, const Vec& w, double delta)
{
    if (full_chord_depth(dom, x, inward(n, w, 0)) <= delta)
        return 1;
    double lo = 0, hi = pi / 2;
    for (int i = 0; i < 42; ++i)
    {
        double mid = 0.5 * (lo + hi);
        if (full_chord_depth(dom, x, inward(n, w, mid)) <= delta)
            hi = mid;
        else
            lo = mid;
    }
    return std::cos(hi);
}

void check_boundary(const ConvexDomain& dom, const Vec& x)
{
    VF_REQUIRE(!dom.is_torus(), invalid_argument, "the torus has no boundary");
    VF_REQUIRE(std::abs(dom.signed_distance(x)) <= 1e-9 * std::max(1.0, dom.diameter()),
               not_on_boundary, "point is not on the boundary");
}

double h_at(const ConvexDomain& dom, const BoundarySample& b, double p, int azimuths)
{
    double h = 0;
    for (const Vec& w : tangents(b.n, dom.dim(), azimuths))
        h = std::max(h, side_h(dom, b.x, b.n, w, 1 / p));
    return h;
}

}  // namespace

double chord_depth(const ConvexDomain& dom, const Vec& x, const Vec& v, double s_max)
{
    if (!(s_max > 0))
        return std::max(0.0, -dom.signed_distance(x));
    auto f = [&](double s) { return -dom.signed_distance(x + s * v); };
    double m = golden_max(f, 0, s_max, 44);
    return std::max({m, f(0), f(s_max), 0.0});
}

double h_p(const ConvexDomain& dom, const Vec& x, double p, int azimuths)
{
    VF_REQUIRE(p >= 1, invalid_argument, "p must be at least 1");
    check_boundary(dom, x);
    BoundarySample b{x, dom.outward_normal(x)};
    return h_at(dom, b, p, azimuths);
}

std::vector<BoundarySample> grazing_boundary_samples(const ConvexDomain& dom,
                                                     const GrazingOptions& opt)
{
    VF_REQUIRE(!dom.is_torus(), invalid_argument, "the torus has no boundary");
    VF_REQUIRE(opt.boundary_samples >= 8, invalid_argument, "need at least 8 boundary samples");
    std::vector<BoundarySample> out;
    out.reserve(opt.boundary_samples);
    if (dom.dim() == 2)
    {
        for (int k = 0; k < opt.boundary_samples; ++k)
            out.push_back(dom.boundary_param(2 * pi * k / opt.boundary_samples));
        return out;
    }
    CounterRng base(opt.seed, 0x67a2);
    for (int k = 0; k < opt.boundary_samples; ++k)
    {
        CounterRng r = base.split(k);
        out.push_back(dom.sample_boundary(r));
    }
    return out;
}

std::vector<HpRow> h_p_table(const ConvexDomain& dom, const std::vector<double>& ps,
                             const GrazingOptions& opt)
{
    auto samples = grazing_boundary_samples(dom, opt);
    std::vector<HpRow> rows;
    std::vector<double> prev;
    for (double p : ps)
    {
        VF_REQUIRE(p >= 1, invalid_argument, "p must be at least 1");
        VF_REQUIRE(rows.empty() || p > rows.back().p, invalid_argument,
                   "p values must be increasing");
        HpRow row;
        row.p = p;
        std::vector<double> cur(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            cur[i] = h_at(dom, samples[i], p, opt.azimuths);
            if (!prev.empty())
                VF_REQUIRE(cur[i] <= prev[i] + 1e-9, sampling_too_coarse,
                           "h_p increased with p at a boundary sample");
            if (cur[i] > row.sup_h)
            {
                row.sup_h = cur[i];
                row.argmax = samples[i].x;
            }
        }
        VF_REQUIRE(rows.empty() || row.sup_h <= rows.back().sup_h + 1e-9, sampling_too_coarse,
                   "sup h_p increased with p");
        rows.push_back(row);
        prev = std::move(cur);
    }
    return rows;
}

SupHp sup_h_p(const ConvexDomain& dom, double p, const GrazingOptions& opt)
{
    auto samples = grazing_boundary_samples(dom, opt);
    SupHp out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        double h = h_at(dom, samples[i], p, opt.azimuths);
        if (h > out.scan)
        {
            out.scan = h;
            best = i;
        }
    }
    out.refined = out.scan;
    out.x = samples[best].x;
    if (dom.dim() != 2)
        return out;
    double step = 2 * pi / opt.boundary_samples;
    double phi0 = step * best;
    out.phi = phi0;
    auto f = [&](double phi) { return h_at(dom, dom.boundary_param(phi), p, opt.azimuths); };
    double arg = phi0;
    double m = golden_max(f, phi0 - step, phi0 + step, 60, &arg);
    if (m > out.refined)
    {
        out.refined = m;
        out.phi = arg;
        out.x = dom.boundary_param(arg).x;
    }
    return out;
}

int p_threshold(const ConvexDomain& dom, double eta, const GrazingOptions& opt)
{
    VF_REQUIRE(eta > 0, invalid_argument, "threshold must be positive");
    if (eta >= 1)
        return 1;
    double psi_c = std::acos(eta);
    double pmax = 1;
    for (const auto& b : grazing_boundary_samples(dom, opt))
    {
        double dmin = std::numeric_limits<double>::infinity();
        for (const Vec& w : tangents(b.n, dom.dim(), opt.azimuths))
            dmin = std::min(dmin, full_chord_depth(dom, b.x, inward(b.n, w, psi_c)));
        VF_REQUIRE(dmin > 0, sampling_too_coarse, "degenerate chord depth at a boundary sample");
        pmax = std::max(pmax, std::ceil(1 / dmin - 1e-9));
    }
    VF_REQUIRE(pmax < 2e9, sampling_too_coarse, "p threshold overflows");
    return static_cast<int>(pmax);
}

double alpha_x(const ConvexDomain& dom, double eps, const GrazingOptions& opt)
{
    VF_REQUIRE(eps > 0, invalid_argument, "eps must be positive");
    auto s = grazing_boundary_samples(dom, opt);
    double best = dom.diameter();
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
        {
            double c = dot(s[i].n, s[j].n);
            double op = 2 * std::sqrt(std::max(0.0, 1 - c * c));
            if (op > eps / 2)
                best = std::min(best, norm(s[i].x - s[j].x));
        }
    double spacing = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        double nn = std::numeric_limits<double>::infinity();
        if (dom.dim() == 2)
            nn = norm(s[i].x - s[(i + 1) % s.size()].x);
        else
            for (std::size_t j = 0; j < s.size(); ++j)
                if (j != i)
                    nn = std::min(nn, norm(s[i].x - s[j].x));
        spacing = std::max(spacing, nn);
    }
    VF_REQUIRE(best >= 2 * spacing, sampling_too_coarse,
               "alpha_X is below twice the boundary sample spacing");
    return best;
}

double GrazingConstants::t_at(double vM) const
{
    return std::max(alpha_x / vM, 1 / (p_eps * vM));
}

double GrazingConstants::l_at(double vm, double tau) const
{
    return std::min(1.0 / p_eps, vm * tau * eps / 4);
}

GrazingConstants grazing_constants(const ConvexDomain& dom, double eps, double v_m,
                                   double v_M, double tau2, const GrazingOptions& opt,
                                   const std::vector<double>& table_ps)
{
    VF_REQUIRE(eps > 0, invalid_argument, "eps must be positive");
    VF_REQUIRE(v_m > 0 && v_m < v_M, invalid_argument, "need 0 < v_m < v_M");
    VF_REQUIRE(tau2 > 0, invalid_argument, "tau2 must be positive");
    GrazingConstants g;
    g.eps = eps;
    g.v_m = v_m;
    g.v_M = v_M;
    g.p_eps = p_threshold(dom, eps / 2, opt);
    g.alpha_x = alpha_x(dom, eps, opt);
    g.t_eps = g.t_at(v_M);
    g.tau2 = std::min(tau2, g.t_eps);
    g.l_eps = g.l_at(v_m, g.tau2);
    if (!table_ps.empty())
        g.table = h_p_table(dom, table_ps, opt);
    return g;
}

DriftResult drift_check(const ConvexDomain& dom, const Vec& x0, const Vec& v0, double t,
                        double l, double tau_hyp)
{
    VF_REQUIRE(norm2(v0) > 0, zero_velocity, "velocity must be nonzero");
    if (tau_hyp < 0)
        tau_hyp = t;
    DriftResult out;
    Vec x = x0, v = v0;
    double elapsed = 0;
    double tol = 1e-12 * std::max(1.0, dom.diameter());
    for (int guard = 0; guard < 1000000 && elapsed < t; ++guard)
    {
        double s = dom.is_torus() ? std::numeric_limits<double>::infinity() : dom.chord_end(x, v);
        if (!(s > tol) || !std::isfinite(s))
            s = std::isfinite(s) ? 0 : t - elapsed;
        double seg = std::min(s, t - elapsed);
        if (elapsed < tau_hyp && seg > 0)
        {
            double w = std::min(seg, tau_hyp - elapsed);
            double dep = dom.is_torus() ? 0 : chord_depth(dom, x, v, w);
            out.max_depth = std::max(out.max_depth, dep);
            if (dep > l)
                out.hypothesis_held = false;
        }
        x = x + seg * v;
        elapsed += seg;
        if (elapsed >= t || seg < s)
            break;
        Vec n = dom.normal_at(x);
        if (dot(v, n) <= 0)
            break;
        v = specular_reflect(v, n);
        ++out.rebounds;
        out.drift = std::max(out.drift, norm(v - v0));
    }
    return out;
}

FalsificationReport falsify_grazing(const ConvexDomain& dom, const GrazingConstants& gc,
                                    std::uint64_t trials, std::uint64_t seed)
{
    FalsificationReport rep;
    CounterRng base(seed, 0x9a21);
    for (std::uint64_t i = 0; i < trials; ++i)
    {
        CounterRng r = base.split(i);
        BoundarySample b = dom.sample_boundary(r);
        double c = gc.eps * r.uniform_pos();
        double speed = gc.v_m + (gc.v_M - gc.v_m) * r.uniform();
        Vec w;
        if (dom.dim() == 2)
            w = r.uniform() < 0.5 ? Vec(-b.n[1], b.n[0]) : Vec(b.n[1], -b.n[0]);
        else
        {
            auto ts = tangents(b.n, 3, 1);
            Vec e1 = ts[0], e2 = cross(b.n, e1);
            double phi = 2 * pi * r.uniform();
            w = std::cos(phi) * e1 + std::sin(phi) * e2;
        }
        double sc = std::sqrt(1 - c * c);
        Vec x, v;
        if (i % 2 == 0)
        {
            x = b.x;
            v = speed * (-c * b.n + sc * w);
        }
        else
        {
            Vec out_dir = c * b.n + sc * w;
            double back = dom.chord_end(b.x, -out_dir);
            double u = std::min(gc.t_eps * speed * r.uniform(), std::max(back, 0.0));
            x = b.x - u * out_dir;
            v = speed * out_dir;
        }
        DriftResult d = drift_check(dom, x, v, gc.t_eps, gc.l_eps, gc.tau2);
        ++rep.trials;
        if (d.hypothesis_held)
        {
            ++rep.hypothesis_held;
            rep.max_drift_held = std::max(rep.max_drift_held, d.drift);
            if (d.drift > gc.eps * (1 + 1e-12))
                ++rep.counterexamples;
        }
    }
    return rep;
}

}  // namespace vf
