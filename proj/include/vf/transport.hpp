// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vf/characteristics.hpp"

namespace vf {

using PhaseFn = std::function<double(const Vec&, const Vec&)>;

//! Initial datum u0(x, v) with an optional sampled copy
struct PhaseField
{
    PhaseFn eval;
    std::vector<Vec> xs;
    std::vector<Vec> vs;
    std::vector<double> values;  //!< row-major over (xs, vs)

    double operator()(const Vec& x, const Vec& v) const { return eval(x, v); }
    //! Attach samples of eval on the given nodes
    void sample(std::vector<Vec> x_nodes, std::vector<Vec> v_nodes);
    //! Max |values - eval| over the attached samples
    double sample_mismatch() const;
};

//! Smooth compactly supported bump: exp(1 - 1/(1 - r^2)) for r < 1
double bump(double r);

PhaseField gaussian_field(Vec x0, double sigma_x, Vec v0, double sigma_v);
PhaseField bump_field(Vec x0, double radius_x, Vec v0, double radius_v);
PhaseField indicator_field(Vec x0, double radius_x, Vec v0, double radius_v);
//! a + b x_0 + c |v|^2
PhaseField polynomial_field(double a, double b, double c);

struct PointValue
{
    double value = 0;
    bool truncated = false;
};

//! u(t, x, v) = u0(x_fin - (t - t_fin) v_fin, v_fin)
PointValue evolve_pointwise(const ConvexDomain& dom, const PhaseField& u0, double t,
                            const Vec& x, const Vec& v, int max_rebounds = 10000);

struct QuadratureSpec
{
    int nx = 64;        //!< nodes per spatial coordinate
    int nv = 32;        //!< nodes per velocity coordinate
    double rv = 1.0;    //!< velocity truncation radius
    double tol = std::numeric_limits<double>::infinity();
    int max_rebounds = 10000;
};

struct L2Entry
{
    double t = 0;
    double l2 = 0;     //!< squared L2 norm over the phase space
    double drift = 0;  //!< relative change from the first entry
    int truncated = 0;
};

struct L2Report
{
    std::vector<L2Entry> entries;
    double max_drift = 0;
    double error_estimate = 0;  //!< relative gap to the half-resolution rule
};

//! Quadrature nodes with weights over the domain (or period box)
struct Nodes
{
    std::vector<Vec> pts;
    std::vector<double> w;
};
Nodes spatial_nodes(const ConvexDomain& dom, int n);
Nodes velocity_nodes(int dim, int n, double rv);

//! Squared L2 norm of u(t) on a fixed tensor rule
double l2_squared(const ConvexDomain& dom, const PhaseField& u0, double t,
                  const Nodes& xn, const Nodes& vn, int max_rebounds,
                  int* truncated = nullptr);

L2Report l2_report(const ConvexDomain& dom, const PhaseField& u0,
                   const std::vector<double>& times, const QuadratureSpec& spec);

}  // namespace vf
