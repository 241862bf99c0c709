// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "vf/geometry.hpp"

namespace vf {

struct GrazingOptions
{
    int boundary_samples = 4096;  //!< N_b
    int azimuths = 32;            //!< tangent directions per point (d = 3)
    std::uint64_t seed = 1;       //!< boundary sampling in d = 3
};

//! Largest distance to the boundary along x + s v, s in [0, s_max]
double chord_depth(const ConvexDomain& dom, const Vec& x, const Vec& v, double s_max);

/*!
 * sup |n(x).v| over inward unit directions whose chord from the boundary
 * point x stays within distance 1/p of the boundary. Throws NotOnBoundary.
 */
double h_p(const ConvexDomain& dom, const Vec& x, double p, int azimuths = 32);

//! Boundary samples: uniform in angle (d = 2) or radial projections (d = 3)
std::vector<BoundarySample> grazing_boundary_samples(const ConvexDomain& dom,
                                                     const GrazingOptions& opt);

struct HpRow
{
    double p = 0;
    double sup_h = 0;
    Vec argmax{};
};

/*!
 * sup_x h_p over the boundary samples for each p (ascending).
 * Throws SamplingTooCoarse if a table is not decreasing in p.
 */
std::vector<HpRow> h_p_table(const ConvexDomain& dom, const std::vector<double>& ps,
                             const GrazingOptions& opt = {});

struct SupHp
{
    double scan = 0;     //!< max over the samples
    double refined = 0;  //!< golden-section refinement around the best sample (d = 2)
    double phi = 0;      //!< boundary parameter of the refined maximiser
    Vec x{};
};

SupHp sup_h_p(const ConvexDomain& dom, double p, const GrazingOptions& opt = {});

//! Smallest integer p with sup_x h_p(x) <= eta over the samples
int p_threshold(const ConvexDomain& dom, double eta, const GrazingOptions& opt = {});

//! Largest boundary distance with |R_x - R_x'| <= eps/2 over sample pairs
double alpha_x(const ConvexDomain& dom, double eps, const GrazingOptions& opt = {});

struct GrazingConstants
{
    double eps = 0;
    double v_m = 0;
    double v_M = 0;
    double tau2 = 0;
    int p_eps = 0;  //!< p_{eps/2}
    double alpha_x = 0;
    double t_eps = 0;
    double l_eps = 0;
    std::vector<HpRow> table;

    //! t_eps(v) = max(alpha_X / v, 1 / (p v))
    double t_at(double vM) const;
    //! l_eps(v, tau) = min(1/p, v tau eps / 4)
    double l_at(double vm, double tau) const;
};

/*!
 * Constants for the grazing implication. table_ps lists the p values of the
 * reported h_p table (may be empty).
 */
GrazingConstants grazing_constants(const ConvexDomain& dom, double eps, double v_m,
                                   double v_M, double tau2, const GrazingOptions& opt = {},
                                   const std::vector<double>& table_ps = {});

struct DriftResult
{
    double drift = 0;              //!< max_{s <= t} |V_s - v|
    bool hypothesis_held = true;   //!< trajectory stayed within l of the boundary
    bool hypothesis_violated() const { return !hypothesis_held; }
    double max_depth = 0;          //!< over the hypothesis window
    int rebounds = 0;
};

/*!
 * Forward specular flight from (x, v) over [0, t]. The hypothesis window is
 * [0, tau_hyp] (defaults to t).
 */
DriftResult drift_check(const ConvexDomain& dom, const Vec& x, const Vec& v, double t,
                        double l, double tau_hyp = -1);

struct FalsificationReport
{
    std::uint64_t trials = 0;
    std::uint64_t hypothesis_held = 0;
    std::uint64_t counterexamples = 0;  //!< hypothesis held but drift > eps
    double max_drift_held = 0;
};

/*!
 * Randomised grazing launches: half from boundary points with |n.v|/|v| in
 * (0, eps], half from interior points reaching the boundary within t_eps.
 */
FalsificationReport falsify_grazing(const ConvexDomain& dom, const GrazingConstants& gc,
                                    std::uint64_t trials, std::uint64_t seed = 1);

}  // namespace vf
