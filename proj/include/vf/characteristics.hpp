// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "vf/geometry.hpp"

namespace vf {

enum class BoundaryClass
{
    rebounds,
    rolling,
    stop,
    line,
};

const char* to_string(BoundaryClass c);

struct PhaseState
{
    Vec x;
    Vec v;
};

struct ReboundEvent
{
    int k = 0;
    Vec x;
    Vec v;
    double t = 0;          //!< cumulative backward time, +inf for the sentinel
    double incidence = 0;  //!< |v_hat . n| at the rebound
};

struct ReboundChain
{
    std::vector<ReboundEvent> events;
    bool truncated = false;
    bool stopped = false;  //!< last event is the +inf sentinel
};

struct TrajectoryResolution
{
    int n = 0;
    Vec x_fin;
    Vec v_fin;
    double t_fin = 0;
    bool truncated = false;
    double min_incidence = 1;  //!< smallest |v_hat . n| over the rebounds used
};

struct Characteristic
{
    PhaseState state;
    bool truncated = false;
    double min_incidence = 1;
};

//! Tangency band half-width for the v.n trichotomy
inline double tangency_tol(const Vec& v) { return 1e-9 * norm(v); }

BoundaryClass classify_boundary(const ConvexDomain& dom, const Vec& x, const Vec& v);

//! max{t >= 0 : x - v s in the closure for s in [0, t]}
double t_min_backward(const ConvexDomain& dom, const Vec& x, const Vec& v);

ReboundChain rebound_sequence(const ConvexDomain& dom, const Vec& x, const Vec& v,
                              double horizon, int max_rebounds = 10000);

TrajectoryResolution final_rebound(const ConvexDomain& dom, double t, const Vec& x,
                                   const Vec& v, int max_rebounds = 10000);

//! Forward characteristic (X_t, V_t) issued from (x, v)
Characteristic characteristic_at(const ConvexDomain& dom, const Vec& x,
                                 const Vec& v, double t, int max_rebounds = 10000);

}  // namespace vf
