// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "vf/kernel.hpp"
#include "vf/vec.hpp"

namespace vf {

//! Uniform grid with nodes (i - N/2) h per axis, h = 2 R_v / N
struct VelocityGrid
{
    int dim = 3;
    double rv = 4;
    int nv = 32;

    double h() const { return 2 * rv / nv; }
    double cell_volume() const;
    std::size_t size() const;
    Vec node(std::size_t flat) const;
    std::array<int, 3> multi_index(std::size_t flat) const;
    std::size_t flat_index(const std::array<int, 3>& idx) const;
    //! Flat index of the node nearest to v, or size() when outside
    std::size_t nearest(const Vec& v) const;
    bool operator==(const VelocityGrid& o) const
    {
        return dim == o.dim && rv == o.rv && nv == o.nv;
    }
};

//! Throws InvalidArgument for odd or non-positive N_v
void validate(const VelocityGrid& g);

//! Node values on a velocity grid; zero outside the node box
class GridFunction
{
  public:
    GridFunction() = default;
    explicit GridFunction(const VelocityGrid& grid);
    GridFunction(const VelocityGrid& grid, const std::function<double(const Vec&)>& f);

    const VelocityGrid& grid() const { return grid_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    //! Multilinear interpolation
    double interp(const Vec& v) const;
    //! Tensor Catmull-Rom interpolation (C^1), used where second-order
    //! cancellations must survive interpolation
    double interp_cubic(const Vec& v) const;

    //! sum_j <v_j>^k g_j h^d
    double weighted_l1(double k) const;
    //! e_g = int <v>^2 g
    double energy() const { return weighted_l1(2); }
    double mass() const { return weighted_l1(0); }
    //! max(|h|, |grad h|, |Hessian h|) by centred differences
    double w2inf_norm() const;
    //! Bounding box [lo, hi] of nonzero values, padded by one cell
    bool support_box(Vec& lo, Vec& hi) const;

  private:
    VelocityGrid grid_;
    std::vector<double> values_;
};

struct McEstimate
{
    double value = 0;
    double stderr_ = 0;
    std::uint64_t samples = 0;
    double rel_se() const { return value != 0 ? stderr_ / std::abs(value) : 0; }
};

struct McSpec
{
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    std::uint64_t chunk = 8192;
};

struct ThetaRange
{
    double lo = 0;
    double hi = std::numbers::pi;
};

/*!
 * Q+(g, h)(v) = int Phi b h(v') g(v'_*) dv_* dsigma by Monte Carlo.
 * Non-cutoff kernels need lo > 0. Throws GridMismatch.
 */
McEstimate eval_qplus(const Kernel& k, const GridFunction& g, const GridFunction& h,
                      const Vec& v, const McSpec& mc, ThetaRange range = {});

//! Full-sphere angular mass used by L: n_b for cutoff, n_b_CO(eps) otherwise
double loss_angular_mass(const Kernel& k, double eps);

//! L[g](v) = n_b (Phi * g)(v) by node quadrature
double eval_loss(const Kernel& k, const GridFunction& g, const Vec& v, double eps = 0);

struct SQ1
{
    McEstimate s;
    McEstimate q1;
};

/*!
 * S[g](v) = -int Phi b_eps^NCO (g'_* - g_*) and
 * Q1(g, h)(v) = int Phi b_eps^NCO g'_* (h' - h).
 * box_eps (>= eps) fixes the v_* sampling box so that runs at different eps
 * share random numbers. Throws NotNonCutoff if nu < 0.
 */
SQ1 eval_s_and_q1(const Kernel& k, double eps, const GridFunction& g, const GridFunction& h,
                  const Vec& v, const McSpec& mc, double box_eps = 0);

struct SpreadingResult
{
    double estimate = 0;   //!< inf over target nodes divided by the lemma scale
    double stderr_ = 0;
    double min_value = 0;  //!< raw inf of Q+ over target nodes
    double scale = 0;      //!< l_b c_Phi r^{d-3} R^{3+gamma} xi^{d/2-1}
    Vec argmin{};
    std::size_t nodes = 0;
    std::uint64_t samples = 0;
    double max_rel_se = 0;  //!< relative SE at the minimising node
};

/*!
 * Q+(1_{B(vbar,R)}, 1_{B(vbar,r)}) on the grid nodes inside
 * B(vbar, sqrt(r^2+R^2)(1-xi)) with analytic indicators. Nodes near the
 * minimum are refined until the relative SE is at most target_rel_se.
 * Throws EmptyTargetBall.
 */
SpreadingResult spreading_constant(const Kernel& k, const Vec& vbar, double r, double R,
                                   double xi, const VelocityGrid& grid, const McSpec& mc,
                                   double target_rel_se = 0.02);

//! Q+(1_{B(vbar,R)}, 1_{B(vbar,r)})(v) at a single velocity
McEstimate spreading_value(const Kernel& k, const Vec& vbar, double r, double R,
                           const Vec& v, const McSpec& mc);

//! Fitted constants for the operator bound shapes
struct BoundFit
{
    double c_loss = 0;  //!< max |L| / (n_b C_Phi e_g <v>^{gamma+})
    double c_s = 0;     //!< max |S| / (m_b C_Phi e_g <v>^{gamma+})
    double c_q1 = 0;    //!< max |Q1| / (m_b C_Phi |g|_{L1_gt} |h|_{W2inf} <v>^{gt})
    double s_rel_se = 0;
    double q1_rel_se = 0;
};

//! c_loss over all nodes; c_s and c_q1 over the probe velocities (non-cutoff only)
BoundFit fit_bound_constants(const Kernel& k, double eps, const GridFunction& g,
                             const GridFunction& h, const std::vector<Vec>& probes,
                             const McSpec& mc);

}  // namespace vf
