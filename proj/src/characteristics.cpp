// SPDX-License-Identifier: Apache-2.0
#include "vf/characteristics.hpp"

#include <cmath>
#include <limits>

#include "vf/error.hpp"

namespace vf {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Classification of a pair already known to sit on the boundary.
BoundaryClass classify_on(const ConvexDomain& dom, const Vec& x, const Vec& v,
                          const Vec& n)
{
    double vn = dot(v, n);
    double tol = tangency_tol(v);
    if (vn < -tol)
        return BoundaryClass::rebounds;
    if (vn > tol)
        return BoundaryClass::line;
    // Short-time exit test: does x - v delta leave the closed body?
    double delta = 1e-6 * dom.diameter() / norm(v);
    Vec y = x - v * delta;
    return dom.signed_distance(y) > 0 ? BoundaryClass::stop : BoundaryClass::rolling;
}

struct Step
{
    bool stop = false;
    double tm = 0;
};

// Backward free-flight time from (x_k, v_k); flags a Stop point.
Step next_step(const ConvexDomain& dom, const Vec& x, const Vec& v, bool on_boundary,
               bool first)
{
    Step s;
    double const tiny = dom.tol() / norm(v);
    if (!on_boundary)
    {
        s.tm = std::max(0.0, dom.chord_end(x, -v));
        return s;
    }
    Vec n = dom.normal_at(x);
    BoundaryClass cls = classify_on(dom, x, v, n);
    switch (cls)
    {
        case BoundaryClass::stop:
            s.stop = true;
            return s;
        case BoundaryClass::rebounds:
            // A fresh rebound only at the starting point; later it is a
            // rounding artefact of a tangential hit.
            s.stop = !first;
            s.tm = 0;
            return s;
        case BoundaryClass::rolling:
        case BoundaryClass::line:
            s.tm = std::max(0.0, dom.chord_end(x, -v));
            if (!first && s.tm <= tiny)
                s.stop = true;
            return s;
    }
    return s;
}
}  // namespace

const char* to_string(BoundaryClass c)
{
    switch (c)
    {
        case BoundaryClass::rebounds: return "rebounds";
        case BoundaryClass::rolling: return "rolling";
        case BoundaryClass::stop: return "stop";
        case BoundaryClass::line: return "line";
    }
    return "unknown";
}

BoundaryClass classify_boundary(const ConvexDomain& dom, const Vec& x, const Vec& v)
{
    VF_REQUIRE(norm2(v) > 0, zero_velocity, "velocity must be nonzero");
    VF_REQUIRE(!dom.is_torus() && dom.locate(x).cls == LocClass::boundary,
               not_on_boundary, "point is not on the boundary");
    return classify_on(dom, x, v, dom.normal_at(x));
}

double t_min_backward(const ConvexDomain& dom, const Vec& x, const Vec& v)
{
    VF_REQUIRE(norm2(v) > 0, zero_velocity, "velocity must be nonzero");
    if (dom.is_torus())
        return kInf;
    bool on_b = dom.locate(x).cls == LocClass::boundary;
    Step s = next_step(dom, x, v, on_b, true);
    return s.stop ? 0.0 : s.tm;
}

ReboundChain rebound_sequence(const ConvexDomain& dom, const Vec& x, const Vec& v,
                              double horizon, int max_rebounds)
{
    VF_REQUIRE(norm2(v) > 0, zero_velocity, "velocity must be nonzero");
    VF_REQUIRE(horizon >= 0, invalid_argument, "horizon must be nonnegative");
    ReboundChain chain;
    if (dom.is_torus())
        return chain;
    Vec xk = x, vk = v;
    double tk = 0;
    bool on_b = dom.locate(x).cls == LocClass::boundary;
    double const vnorm = norm(v);
    for (int k = 0;; ++k)
    {
        Step s = next_step(dom, xk, vk, on_b, k == 0);
        if (s.stop)
        {
            chain.events.push_back({k + 1, xk, vk, kInf, 0.0});
            chain.stopped = true;
            return chain;
        }
        double tnext = tk + s.tm;
        if (tnext > horizon)
            return chain;
        if (k == max_rebounds)
        {
            chain.truncated = true;
            return chain;
        }
        Vec xn = xk - vk * s.tm;
        Vec n = dom.normal_at(xn);
        ReboundEvent ev;
        ev.k = k + 1;
        ev.x = xn;
        ev.v = specular_reflect(vk, n);
        ev.t = tnext;
        ev.incidence = std::abs(dot(vk, n)) / vnorm;
        chain.events.push_back(ev);
        xk = ev.x;
        vk = ev.v;
        tk = tnext;
        on_b = true;
    }
}

TrajectoryResolution final_rebound(const ConvexDomain& dom, double t, const Vec& x,
                                   const Vec& v, int max_rebounds)
{
    VF_REQUIRE(t >= 0, invalid_argument, "time must be nonnegative");
    TrajectoryResolution r;
    r.x_fin = x;
    r.v_fin = v;
    r.t_fin = 0;
    if (t == 0 || dom.is_torus() || norm2(v) == 0)
        return r;
    Vec xk = x, vk = v;
    double tk = 0;
    bool on_b = dom.locate(x).cls == LocClass::boundary;
    double const vnorm = norm(v);
    for (int k = 0;; ++k)
    {
        Step s = next_step(dom, xk, vk, on_b, k == 0);
        if (s.stop)
        {
            r.n = k;
            r.x_fin = xk;
            r.v_fin = vk;
            r.t_fin = t;
            return r;
        }
        double tnext = tk + s.tm;
        if (tnext > t || k == max_rebounds)
        {
            r.n = k;
            r.x_fin = xk;
            r.v_fin = vk;
            r.t_fin = tk;
            r.truncated = tnext <= t;
            return r;
        }
        xk = xk - vk * s.tm;
        Vec n = dom.normal_at(xk);
        r.min_incidence = std::min(r.min_incidence, std::abs(dot(vk, n)) / vnorm);
        vk = specular_reflect(vk, n);
        tk = tnext;
        on_b = true;
    }
}

Characteristic characteristic_at(const ConvexDomain& dom, const Vec& x, const Vec& v,
                                 double t, int max_rebounds)
{
    VF_REQUIRE(t >= 0, invalid_argument, "time must be nonnegative");
    Characteristic c;
    if (norm2(v) == 0)
    {
        c.state = {x, v};
        return c;
    }
    if (dom.is_torus())
    {
        c.state = {dom.wrap(x + v * t), v};
        return c;
    }
    TrajectoryResolution fr = final_rebound(dom, t, x, -v, max_rebounds);
    c.state.x = fr.x_fin - fr.v_fin * (t - fr.t_fin);
    c.state.v = -fr.v_fin;
    c.truncated = fr.truncated;
    c.min_incidence = fr.min_incidence;
    return c;
}

}  // namespace vf
