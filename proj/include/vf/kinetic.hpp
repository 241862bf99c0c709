// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vf/collision.hpp"
#include "vf/geometry.hpp"
#include "vf/kernel.hpp"

namespace vf {

/*!
 * Conservative discrete velocity collision operator on a uniform grid.
 * A pair (v_i, v_j) exchanges to every pair (v_k, v_l) of nodes with the
 * same momentum and energy; weights are Phi(|v_i - v_j|) b(cos theta)
 * |S^{d-1}| / #(lattice points on the collision sphere), symmetric under
 * (i, j) <-> (k, l).
 */
class DvmCollision
{
  public:
    DvmCollision(const Kernel& k, const VelocityGrid& grid);

    const VelocityGrid& grid() const { return grid_; }
    //! Gain and loss frequency: Q(f)_i = gain_i - loss_i f_i. Returns max loss.
    double evaluate(const double* f, double* gain, double* loss) const;
    //! Number of stored (difference, post-collision) entries
    std::size_t stencil_size() const { return entries_.size(); }

  private:
    struct Entry
    {
        std::array<int, 3> half;  //!< (d + d') / 2
        double w;
    };
    VelocityGrid grid_;
    int span_ = 0;  //!< 2 N - 1
    std::vector<std::size_t> offset_;
    std::vector<Entry> entries_;
};

//! Distribution on an optional spatial grid times a velocity grid
struct KineticState
{
    VelocityGrid vgrid;
    int nx = 0;                      //!< spatial cells per axis; 0 for homogeneous
    std::vector<Vec> cells;          //!< active cell centres
    std::vector<double> cell_w;      //!< quadrature weights of active cells
    std::vector<int> cell_box;       //!< box index (i + nx j) of each active cell
    std::vector<double> f;           //!< f[cell * |V| + node]
    double t = 0;

    std::size_t n_cells() const { return nx ? cells.size() : 1; }
    std::size_t n_nodes() const { return vgrid.size(); }
};

double state_mass(const KineticState& s);
//! int |v|^2 f
double state_energy(const KineticState& s);
double state_min(const KineticState& s);

//! inf over nodes (and active cells) of f / (rho (2 pi theta)^{-d/2} e^{-|v|^2 / 2 theta})
double lower_bound_ratio(const KineticState& s, double rho, double theta);

//! min of f over nodes with |v - c| <= r (all active cells)
double min_over_ball(const KineticState& s, const Vec& c, double r);
//! min over active cells of sum_{|v - c| <= r} f h^d
double min_ball_integral(const KineticState& s, const Vec& c, double r);

struct KineticDiagnostics
{
    double t = 0;
    double mass = 0;
    double energy = 0;
    double min_f = 0;
    double lb_ratio = 0;          //!< NaN when no certificate was given
    double mass_drift = 0;        //!< relative to t = 0
    double energy_drift = 0;
    double min_before_clip = 0;
    long clip_events = 0;         //!< cumulative
    long extrapolations = 0;      //!< transport deposits redirected from outside cells
};

struct SimOptions
{
    double T = 1;
    double dt = 0.01;
    bool collisions = true;
    double rho = 0;        //!< certificate density; 0 disables the ratio
    double theta = 0;
    int snapshot_every = 0;
};

struct Trajectory
{
    std::vector<KineticDiagnostics> series;
    std::vector<KineticState> snapshots;
    KineticState final_state;
    double max_mass_drift = 0;
    double max_energy_drift = 0;
    long clip_events = 0;
};

//! Explicit Euler for df/dt = Q+(f, f) - L[f] f. Throws StabilityViolation.
Trajectory homogeneous_solve(const Kernel& k, const GridFunction& f0, const SimOptions& opt);

//! Active cells of a 2-D domain (centres inside) on an n x n box grid
KineticState make_spatial_state(const ConvexDomain& dom, int nx, const VelocityGrid& vg);

using PhaseInit = std::function<double(const Vec&, const Vec&)>;

/*!
 * Strang splitting in d = 2: half transport, collision step per cell, half
 * transport. The transport sweep follows the characteristic of every
 * (cell, node) pair and deposits its mass with bilinear weights in x and v
 * (the adjoint of bilinear interpolation); weights on cells outside the
 * domain go to the nearest active cell. Throws StabilityViolation,
 * InvalidArgument.
 */
Trajectory inhomogeneous_solve(const ConvexDomain& dom, const Kernel& k, const PhaseInit& f0,
                               int nx, const VelocityGrid& vg, const SimOptions& opt);

/*!
 * Little-endian snapshot: uint32 d, uint32 rank, uint32 dims[rank],
 * float64 t, float64 values in row-major order over dims. Spatial runs
 * have dims {nx, nx, N_v, N_v} with zeros at inactive cells; homogeneous
 * runs have dims {N_v, ..., N_v}.
 */
void write_snapshot(const std::string& path, const KineticState& s);

struct Snapshot
{
    std::uint32_t d = 0;
    std::vector<std::uint32_t> dims;
    double t = 0;
    std::vector<double> values;
};
Snapshot read_snapshot(const std::string& path);

}  // namespace vf
