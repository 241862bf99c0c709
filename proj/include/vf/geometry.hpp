// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "vf/rng.hpp"
#include "vf/vec.hpp"

namespace vf {

enum class Shape
{
    disk,
    ellipse,
    superellipse,
    torus,
};

enum class LocClass
{
    interior,
    boundary,
    exterior,
};

struct Locate
{
    LocClass cls = LocClass::interior;
    double signed_distance = 0;  //!< negative inside
};

//! Point and outward unit normal of a boundary parameterization
struct BoundarySample
{
    Vec x;
    Vec n;
};

/*!
 * Bounded convex body with C2 boundary given by an implicit function, or
 * the flat torus (no boundary).
 *
 * Superellipse: sum_i ((x_i - c_i)/a_i)^p <= 1 with even p >= 2, planar only.
 * Torus positions live in [0, L_i).
 */
class ConvexDomain
{
  public:
    static ConvexDomain disk(Vec center, double radius, int dim = 2);
    static ConvexDomain ellipse(Vec center, Vec axes, int dim = 2);
    static ConvexDomain superellipse(Vec center, Vec axes, int p);
    static ConvexDomain torus(Vec period, int dim = 2);

    Shape shape() const { return shape_; }
    int dim() const { return dim_; }
    double tol() const { return tol_; }
    double diameter() const { return diameter_; }
    const Vec& center() const { return center_; }
    const Vec& axes() const { return axes_; }
    int exponent() const { return p_; }
    bool is_torus() const { return shape_ == Shape::torus; }
    std::string name() const;

    //! Lebesgue measure of the body
    double volume() const;
    //! Radius of a ball around center() containing the closure
    double bounding_radius() const;

    //! Implicit function, negative inside (dimensionless)
    double implicit(const Vec& x) const;
    Locate locate(const Vec& x) const;
    double signed_distance(const Vec& x) const;
    bool in_closure(const Vec& x) const
    {
        return locate(x).cls != LocClass::exterior;
    }

    //! Checked outward normal; throws NotOnBoundary
    Vec outward_normal(const Vec& x) const;
    //! Normalized gradient of the implicit function (no check)
    Vec normal_at(const Vec& x) const;

    //! Smallest t >= 0 with x + t v on the boundary
    double first_contact(const Vec& x, const Vec& v) const;
    //! Largest root s of implicit(x + s v) = 0 (may be negative)
    double chord_end(const Vec& x, const Vec& v) const;

    //! Periodic wrap (identity for bounded shapes)
    Vec wrap(const Vec& x) const;

    //! Planar boundary parameterization, phi in [0, 2 pi)
    BoundarySample boundary_param(double phi) const;

    Vec sample_interior(CounterRng& rng) const;
    //! Boundary point hit by the ray from the center along a random direction
    BoundarySample sample_boundary(CounterRng& rng) const;

  private:
    ConvexDomain() = default;
    void finalize();
    double superellipse_radius(double phi) const;
    double superellipse_distance(const Vec& x) const;
    double superellipse_root(const Vec& x, const Vec& v) const;

    Shape shape_ = Shape::disk;
    int dim_ = 2;
    Vec center_;
    Vec axes_{1, 1, 1};
    int p_ = 2;
    double diameter_ = 2;
    double tol_ = 2e-12;
};

//! v - 2 (v.n) n
inline Vec specular_reflect(const Vec& v, const Vec& n)
{
    return v - (2.0 * dot(v, n)) * n;
}

//! Integer power for small exponents
inline double ipow(double x, int p)
{
    double r = 1.0;
    while (p > 0)
    {
        if (p & 1)
            r *= x;
        x *= x;
        p >>= 1;
    }
    return r;
}

//! Unsigned distance from a point to an ellipse (semi-axes e0, e1)
double ellipse_distance(double e0, double e1, double y0, double y1);
//! Unsigned distance from a point to an ellipsoid surface
double ellipsoid_distance(double e0, double e1, double e2, double y0,
                          double y1, double y2);

}  // namespace vf
