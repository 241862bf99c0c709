// SPDX-License-Identifier: Apache-2.0
#include "vf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "vf/error.hpp"

namespace vf {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Bisection for the ellipse projection parameter (Eberly).
double get_root2(double r0, double z0, double z1, double g)
{
    double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = (g < 0 ? 0.0 : std::hypot(n0, z1) - 1.0);
    double s = 0;
    for (int i = 0; i < 2000; ++i)
    {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1)
            break;
        double ratio0 = n0 / (s + r0);
        double ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (g > 0)
            s0 = s;
        else if (g < 0)
            s1 = s;
        else
            break;
    }
    return s;
}

double get_root3(double r0, double r1, double z0, double z1, double z2,
                 double g)
{
    double n0 = r0 * z0;
    double n1 = r1 * z1;
    double s0 = z2 - 1.0;
    double s1 = (g < 0 ? 0.0 : std::sqrt(n0 * n0 + n1 * n1 + z2 * z2) - 1.0);
    double s = 0;
    for (int i = 0; i < 2000; ++i)
    {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1)
            break;
        double ratio0 = n0 / (s + r0);
        double ratio1 = n1 / (s + r1);
        double ratio2 = z2 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 + ratio2 * ratio2 - 1.0;
        if (g > 0)
            s0 = s;
        else if (g < 0)
            s1 = s;
        else
            break;
    }
    return s;
}

// Closest point on the ellipse with e0 >= e1, query in the first quadrant.
void closest_sorted2(double e0, double e1, double y0, double y1, double& x0,
                     double& x1)
{
    if (y1 > 0)
    {
        if (y0 > 0)
        {
            double z0 = y0 / e0;
            double z1 = y1 / e1;
            double g = z0 * z0 + z1 * z1 - 1.0;
            if (g != 0)
            {
                double r0 = (e0 / e1) * (e0 / e1);
                double sbar = get_root2(r0, z0, z1, g);
                x0 = r0 * y0 / (sbar + r0);
                x1 = y1 / (sbar + 1.0);
            }
            else
            {
                x0 = y0;
                x1 = y1;
            }
        }
        else
        {
            x0 = 0;
            x1 = e1;
        }
        return;
    }
    double numer0 = e0 * y0;
    double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0)
    {
        double xde0 = numer0 / denom0;
        x0 = e0 * xde0;
        x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    }
    else
    {
        x0 = e0;
        x1 = 0;
    }
}

void closest_sorted3(const double e[3], const double y[3], double x[3])
{
    if (y[2] > 0)
    {
        if (y[1] > 0)
        {
            if (y[0] > 0)
            {
                double z0 = y[0] / e[0], z1 = y[1] / e[1], z2 = y[2] / e[2];
                double g = z0 * z0 + z1 * z1 + z2 * z2 - 1.0;
                if (g != 0)
                {
                    double r0 = (e[0] / e[2]) * (e[0] / e[2]);
                    double r1 = (e[1] / e[2]) * (e[1] / e[2]);
                    double sbar = get_root3(r0, r1, z0, z1, z2, g);
                    x[0] = r0 * y[0] / (sbar + r0);
                    x[1] = r1 * y[1] / (sbar + r1);
                    x[2] = y[2] / (sbar + 1.0);
                }
                else
                {
                    x[0] = y[0];
                    x[1] = y[1];
                    x[2] = y[2];
                }
            }
            else
            {
                x[0] = 0;
                closest_sorted2(e[1], e[2], y[1], y[2], x[1], x[2]);
            }
        }
        else
        {
            x[1] = 0;
            if (y[0] > 0)
            {
                closest_sorted2(e[0], e[2], y[0], y[2], x[0], x[2]);
            }
            else
            {
                x[0] = 0;
                x[2] = e[2];
            }
        }
        return;
    }
    double denom0 = e[0] * e[0] - e[2] * e[2];
    double denom1 = e[1] * e[1] - e[2] * e[2];
    double numer0 = e[0] * y[0];
    double numer1 = e[1] * y[1];
    if (numer0 < denom0 && numer1 < denom1)
    {
        double xde0 = numer0 / denom0;
        double xde1 = numer1 / denom1;
        double discr = 1.0 - xde0 * xde0 - xde1 * xde1;
        if (discr > 0)
        {
            x[0] = e[0] * xde0;
            x[1] = e[1] * xde1;
            x[2] = e[2] * std::sqrt(discr);
            return;
        }
    }
    x[2] = 0;
    closest_sorted2(e[0], e[1], y[0], y[1], x[0], x[1]);
}
}  // namespace

double ellipse_distance(double e0, double e1, double y0, double y1)
{
    y0 = std::abs(y0);
    y1 = std::abs(y1);
    if (e0 < e1)
    {
        std::swap(e0, e1);
        std::swap(y0, y1);
    }
    double x0, x1;
    closest_sorted2(e0, e1, y0, y1, x0, x1);
    return std::hypot(x0 - y0, x1 - y1);
}

double ellipsoid_distance(double e0, double e1, double e2, double y0,
                          double y1, double y2)
{
    std::pair<double, double> p[3]
        = {{e0, std::abs(y0)}, {e1, std::abs(y1)}, {e2, std::abs(y2)}};
    std::sort(p, p + 3, [](auto const& a, auto const& b) {
        return a.first > b.first;
    });
    double e[3] = {p[0].first, p[1].first, p[2].first};
    double y[3] = {p[0].second, p[1].second, p[2].second};
    double x[3];
    closest_sorted3(e, y, x);
    return std::sqrt((x[0] - y[0]) * (x[0] - y[0])
                     + (x[1] - y[1]) * (x[1] - y[1])
                     + (x[2] - y[2]) * (x[2] - y[2]));
}

//---------------------------------------------------------------------------//
ConvexDomain ConvexDomain::disk(Vec center, double radius, int dim)
{
    VF_REQUIRE(dim == 2 || dim == 3, invalid_argument, "dimension must be 2 or 3");
    VF_REQUIRE(radius > 0 && std::isfinite(radius), invalid_argument,
               "disk radius must be positive");
    ConvexDomain d;
    d.shape_ = Shape::disk;
    d.dim_ = dim;
    d.center_ = center;
    d.axes_ = {radius, radius, dim == 3 ? radius : 0.0};
    d.finalize();
    return d;
}

ConvexDomain ConvexDomain::ellipse(Vec center, Vec axes, int dim)
{
    VF_REQUIRE(dim == 2 || dim == 3, invalid_argument, "dimension must be 2 or 3");
    for (int i = 0; i < dim; ++i)
        VF_REQUIRE(axes[i] > 0 && std::isfinite(axes[i]), invalid_argument,
                   "ellipse semi-axes must be positive");
    ConvexDomain d;
    d.shape_ = Shape::ellipse;
    d.dim_ = dim;
    d.center_ = center;
    d.axes_ = axes;
    if (dim == 2)
        d.axes_[2] = 0;
    d.finalize();
    return d;
}

ConvexDomain ConvexDomain::superellipse(Vec center, Vec axes, int p)
{
    VF_REQUIRE(p >= 2 && p % 2 == 0, invalid_argument,
               "superellipse exponent must be even and >= 2");
    VF_REQUIRE(axes[0] > 0 && axes[1] > 0, invalid_argument,
               "superellipse semi-axes must be positive");
    ConvexDomain d;
    d.shape_ = Shape::superellipse;
    d.dim_ = 2;
    d.center_ = center;
    d.axes_ = {axes[0], axes[1], 0.0};
    d.p_ = p;
    d.finalize();
    return d;
}

ConvexDomain ConvexDomain::torus(Vec period, int dim)
{
    VF_REQUIRE(dim == 2 || dim == 3, invalid_argument, "dimension must be 2 or 3");
    for (int i = 0; i < dim; ++i)
        VF_REQUIRE(period[i] > 0, invalid_argument, "torus period must be positive");
    ConvexDomain d;
    d.shape_ = Shape::torus;
    d.dim_ = dim;
    d.axes_ = period;
    if (dim == 2)
        d.axes_[2] = 0;
    d.center_ = d.axes_ * 0.5;
    d.finalize();
    return d;
}

void ConvexDomain::finalize()
{
    switch (shape_)
    {
        case Shape::disk:
            diameter_ = 2 * axes_[0];
            break;
        case Shape::ellipse:
            diameter_ = 2 * std::max({axes_[0], axes_[1], axes_[2]});
            break;
        case Shape::superellipse: {
            // Centrally symmetric: diameter is twice the largest radius.
            double best = 0;
            int const n = 4096;
            int jbest = 0;
            for (int j = 0; j < n; ++j)
            {
                double r = superellipse_radius(2 * kPi * j / n);
                if (r > best)
                {
                    best = r;
                    jbest = j;
                }
            }
            double lo = 2 * kPi * (jbest - 1) / n, hi = 2 * kPi * (jbest + 1) / n;
            for (int it = 0; it < 100; ++it)
            {
                double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
                if (superellipse_radius(m1) < superellipse_radius(m2))
                    lo = m1;
                else
                    hi = m2;
            }
            diameter_ = 2 * std::max(best, superellipse_radius(0.5 * (lo + hi)));
            break;
        }
        case Shape::torus:
            diameter_ = norm(axes_);
            break;
    }
    tol_ = 1e-12 * diameter_;
}

std::string ConvexDomain::name() const
{
    switch (shape_)
    {
        case Shape::disk: return "disk";
        case Shape::ellipse: return "ellipse";
        case Shape::superellipse: return "superellipse";
        case Shape::torus: return "torus";
    }
    return "unknown";
}

double ConvexDomain::volume() const
{
    switch (shape_)
    {
        case Shape::disk:
            return dim_ == 2 ? kPi * axes_[0] * axes_[0]
                             : 4.0 / 3.0 * kPi * std::pow(axes_[0], 3);
        case Shape::ellipse:
            return dim_ == 2 ? kPi * axes_[0] * axes_[1]
                             : 4.0 / 3.0 * kPi * axes_[0] * axes_[1] * axes_[2];
        case Shape::superellipse: {
            double g1 = std::tgamma(1.0 + 1.0 / p_);
            return 4 * axes_[0] * axes_[1] * g1 * g1 / std::tgamma(1.0 + 2.0 / p_);
        }
        case Shape::torus:
            return dim_ == 2 ? axes_[0] * axes_[1] : axes_[0] * axes_[1] * axes_[2];
    }
    return 0;
}

double ConvexDomain::bounding_radius() const
{
    switch (shape_)
    {
        case Shape::disk: return axes_[0];
        case Shape::ellipse: return std::max({axes_[0], axes_[1], axes_[2]});
        case Shape::superellipse: return 0.5 * diameter_;
        case Shape::torus: return 0.5 * diameter_;
    }
    return 0;
}

double ConvexDomain::superellipse_radius(double phi) const
{
    double s = ipow(std::cos(phi) / axes_[0], p_) + ipow(std::sin(phi) / axes_[1], p_);
    return std::pow(s, -1.0 / p_);
}

double ConvexDomain::implicit(const Vec& x) const
{
    Vec z = x - center_;
    switch (shape_)
    {
        case Shape::disk:
            return norm2(z) / (axes_[0] * axes_[0]) - 1.0;
        case Shape::ellipse: {
            double s = 0;
            for (int i = 0; i < dim_; ++i)
                s += (z[i] / axes_[i]) * (z[i] / axes_[i]);
            return s - 1.0;
        }
        case Shape::superellipse:
            return ipow(z[0] / axes_[0], p_) + ipow(z[1] / axes_[1], p_) - 1.0;
        case Shape::torus:
            return -1.0;
    }
    return 0;
}

Vec ConvexDomain::normal_at(const Vec& x) const
{
    Vec z = x - center_;
    Vec g;
    switch (shape_)
    {
        case Shape::disk:
            g = z;
            break;
        case Shape::ellipse:
            for (int i = 0; i < dim_; ++i)
                g[i] = z[i] / (axes_[i] * axes_[i]);
            break;
        case Shape::superellipse:
            for (int i = 0; i < 2; ++i)
                g[i] = ipow(z[i] / axes_[i], p_ - 1) / axes_[i];
            break;
        case Shape::torus:
            throw Error(Errc::not_on_boundary, "torus has no boundary");
    }
    return normalized(g);
}

// Closest point via the orthogonality condition (z - y(phi)).y'(phi) = 0
// on the polar parameterization, bracketed by a coarse scan.
double ConvexDomain::superellipse_distance(const Vec& x) const
{
    Vec z = x - center_;
    double const a = axes_[0], b = axes_[1];
    int const p = p_;
    auto point = [&](double phi, double& px, double& py, double& dx, double& dy) {
        double c = std::cos(phi), s = std::sin(phi);
        double ca = c / a, sb = s / b;
        double sum = ipow(ca, p) + ipow(sb, p);
        double rho = std::pow(sum, -1.0 / p);
        double dsum = p * (ipow(ca, p - 1) * (-s / a) + ipow(sb, p - 1) * (c / b));
        double drho = -rho * dsum / (p * sum);
        px = rho * c;
        py = rho * s;
        dx = drho * c - rho * s;
        dy = drho * s + rho * c;
    };
    auto h = [&](double phi) {
        double px, py, dx, dy;
        point(phi, px, py, dx, dy);
        return (z[0] - px) * dx + (z[1] - py) * dy;
    };
    auto f = [&](double phi) {
        double px, py, dx, dy;
        point(phi, px, py, dx, dy);
        return (z[0] - px) * (z[0] - px) + (z[1] - py) * (z[1] - py);
    };
    int const n = 64;
    double const step = 2 * kPi / n;
    double best = kInf;
    int jbest = 0;
    for (int j = 0; j < n; ++j)
    {
        double v = f(j * step);
        if (v < best)
        {
            best = v;
            jbest = j;
        }
    }
    double lo = (jbest - 1) * step, hi = (jbest + 1) * step;
    double hlo = h(lo), hhi = h(hi);
    double phi;
    if (hlo >= 0 && hhi <= 0)
    {
        for (int it = 0; it < 200; ++it)
        {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi)
                break;
            if (h(mid) > 0)
                lo = mid;
            else
                hi = mid;
        }
        phi = 0.5 * (lo + hi);
    }
    else
    {
        double const gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 120; ++it)
        {
            if (fc < fd)
            {
                hi = d;
                d = c;
                fd = fc;
                c = hi - gr * (hi - lo);
                fc = f(c);
            }
            else
            {
                lo = c;
                c = d;
                fc = fd;
                d = lo + gr * (hi - lo);
                fd = f(d);
            }
        }
        phi = 0.5 * (lo + hi);
    }
    return std::sqrt(std::min(best, f(phi)));
}

double ConvexDomain::signed_distance(const Vec& x) const
{
    Vec z = x - center_;
    switch (shape_)
    {
        case Shape::disk:
            return norm(z) - axes_[0];
        case Shape::ellipse: {
            double dist = dim_ == 2
                              ? ellipse_distance(axes_[0], axes_[1], z[0], z[1])
                              : ellipsoid_distance(axes_[0], axes_[1], axes_[2],
                                                   z[0], z[1], z[2]);
            return implicit(x) < 0 ? -dist : dist;
        }
        case Shape::superellipse: {
            double f = implicit(x);
            Vec g;
            for (int i = 0; i < 2; ++i)
                g[i] = p_ * ipow(z[i] / axes_[i], p_ - 1) / axes_[i];
            double gn = norm(g);
            if (gn > 0 && std::abs(f) < 1e-7 * gn * diameter_)
                return f / gn;
            double dist = superellipse_distance(x);
            return f < 0 ? -dist : dist;
        }
        case Shape::torus:
            return -kInf;
    }
    return 0;
}

Locate ConvexDomain::locate(const Vec& x) const
{
    Locate loc;
    loc.signed_distance = signed_distance(x);
    if (std::abs(loc.signed_distance) <= tol_)
        loc.cls = LocClass::boundary;
    else
        loc.cls = loc.signed_distance < 0 ? LocClass::interior : LocClass::exterior;
    return loc;
}

Vec ConvexDomain::outward_normal(const Vec& x) const
{
    VF_REQUIRE(!is_torus(), not_on_boundary, "torus has no boundary");
    VF_REQUIRE(locate(x).cls == LocClass::boundary, not_on_boundary,
               "point is not on the boundary");
    return normal_at(x);
}

double ConvexDomain::superellipse_root(const Vec& x, const Vec& v) const
{
    Vec z = x - center_;
    double const a = axes_[0], b = axes_[1];
    int const p = p_;
    double vn = norm(v);
    double rb = std::hypot(a, b);
    auto g = [&](double s) {
        return ipow((z[0] + s * v[0]) / a, p) + ipow((z[1] + s * v[1]) / b, p) - 1.0;
    };
    auto gp = [&](double s) {
        return p
               * (ipow((z[0] + s * v[0]) / a, p - 1) * v[0] / a
                  + ipow((z[1] + s * v[1]) / b, p - 1) * v[1] / b);
    };
    double s_hi = (norm(z) + 2 * rb) / vn;
    double s = s_hi;
    double const scale = rb / vn;
    bool converged = false;
    for (int it = 0; it < 400; ++it)
    {
        double gv = g(s);
        if (gv <= 0)
        {
            converged = true;
            break;
        }
        double d = gp(s);
        if (!(d > 0))
            break;
        double ds = gv / d;
        s -= ds;
        if (ds <= 1e-16 * (std::abs(s) + scale))
        {
            converged = true;
            break;
        }
    }
    if (converged)
        return s;
    // Fallback: bisection between a non-positive and a positive point.
    double lo = 0;
    if (g(lo) > 0)
        return -kInf;
    double hi = s_hi;
    for (int it = 0; it < 300; ++it)
    {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (g(mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    if (!(hi - lo <= 1e-12 * scale))
        throw Error(Errc::root_find_failure, "superellipse contact did not converge");
    return hi;
}

double ConvexDomain::chord_end(const Vec& x, const Vec& v) const
{
    if (is_torus())
        return kInf;
    if (shape_ == Shape::superellipse)
        return superellipse_root(x, v);
    Vec z = x - center_;
    double qa = 0, qb = 0, qc = -1.0;
    for (int i = 0; i < dim_; ++i)
    {
        double inv = 1.0 / (axes_[i] * axes_[i]);
        qa += v[i] * v[i] * inv;
        qb += 2 * z[i] * v[i] * inv;
        qc += z[i] * z[i] * inv;
    }
    double disc = qb * qb - 4 * qa * qc;
    if (disc < 0)
    {
        // Tangent within rounding when the point sits on the closure.
        if (qc > 1e-12)
            return -kInf;
        disc = 0;
    }
    double sq = std::sqrt(disc);
    if (qb <= 0)
        return (-qb + sq) / (2 * qa);
    return 2 * qc / (-qb - sq);
}

double ConvexDomain::first_contact(const Vec& x, const Vec& v) const
{
    VF_REQUIRE(norm2(v) > 0, zero_velocity, "velocity must be nonzero");
    if (is_torus())
        return kInf;
    Locate loc = locate(x);
    VF_REQUIRE(loc.cls != LocClass::exterior, invalid_argument,
               "point lies outside the domain");
    if (loc.cls == LocClass::boundary && dot(normal_at(x), v) >= 0)
        return 0;
    double s = chord_end(x, v);
    VF_REQUIRE(std::isfinite(s), root_find_failure, "no boundary contact found");
    return std::max(s, 0.0);
}

Vec ConvexDomain::wrap(const Vec& x) const
{
    if (!is_torus())
        return x;
    Vec y = x;
    for (int i = 0; i < dim_; ++i)
    {
        y[i] -= axes_[i] * std::floor(y[i] / axes_[i]);
        if (y[i] >= axes_[i])
            y[i] = 0;
    }
    return y;
}

BoundarySample ConvexDomain::boundary_param(double phi) const
{
    VF_REQUIRE(dim_ == 2 && !is_torus(), invalid_argument,
               "boundary parameterization needs a planar bounded shape");
    double c = std::cos(phi), s = std::sin(phi);
    BoundarySample b;
    switch (shape_)
    {
        case Shape::disk:
            b.x = center_ + Vec(c, s) * axes_[0];
            b.n = {c, s};
            break;
        case Shape::ellipse:
            b.x = center_ + Vec(axes_[0] * c, axes_[1] * s);
            b.n = normalized(Vec(c / axes_[0], s / axes_[1]));
            break;
        case Shape::superellipse:
            b.x = center_ + Vec(c, s) * superellipse_radius(phi);
            b.n = normal_at(b.x);
            break;
        case Shape::torus:
            break;
    }
    return b;
}

Vec ConvexDomain::sample_interior(CounterRng& rng) const
{
    if (is_torus())
    {
        Vec x;
        for (int i = 0; i < dim_; ++i)
            x[i] = rng.uniform() * axes_[i];
        return x;
    }
    Vec ext = shape_ == Shape::disk ? Vec(axes_[0], axes_[0], axes_[0]) : axes_;
    for (int attempt = 0; attempt < 10000; ++attempt)
    {
        Vec x = center_;
        for (int i = 0; i < dim_; ++i)
            x[i] += (2 * rng.uniform() - 1) * ext[i];
        if (implicit(x) < 0 && locate(x).cls == LocClass::interior)
            return x;
    }
    throw Error(Errc::invalid_argument, "interior sampling failed");
}

BoundarySample ConvexDomain::sample_boundary(CounterRng& rng) const
{
    VF_REQUIRE(!is_torus(), invalid_argument, "torus has no boundary");
    if (dim_ == 2)
        return boundary_param(2 * kPi * rng.uniform());
    Vec u = rng.unit_vector(3);
    BoundarySample b;
    b.x = center_ + u * chord_end(center_, u);
    b.n = normal_at(b.x);
    return b;
}

}  // namespace vf
