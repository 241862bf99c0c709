// SPDX-License-Identifier: Apache-2.0
#include "vf/kinetic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>

#include "vf/characteristics.hpp"
#include "vf/error.hpp"
#include "vf/parallel.hpp"

namespace vf {

namespace {

constexpr double kPi = std::numbers::pi;

int norm2i(const std::array<int, 3>& a) { return a[0] * a[0] + a[1] * a[1] + a[2] * a[2]; }

bool same_parity(const std::array<int, 3>& a, const std::array<int, 3>& b)
{
    for (int i = 0; i < 3; ++i)
        if (((a[i] - b[i]) & 1) != 0)
            return false;
    return true;
}

}  // namespace

DvmCollision::DvmCollision(const Kernel& k, const VelocityGrid& grid) : grid_(grid)
{
    validate(grid);
    VF_REQUIRE(grid.dim >= 2, invalid_argument, "velocity dimension must be 2 or 3");
    VF_REQUIRE(k.is_cutoff(), invalid_argument, "discrete velocity collisions need a cutoff kernel");
    VF_REQUIRE(k.dim() == grid.dim, grid_mismatch, "kernel and velocity grid dimensions differ");
    int const d = grid.dim;
    int const N = grid.nv;
    span_ = 2 * N - 1;
    int const M = static_cast<int>(std::ceil((N - 1) * std::sqrt(double(d))));
    // lattice vectors grouped by squared norm
    std::vector<std::vector<std::array<int, 3>>> shells(static_cast<std::size_t>(d * M * M + 1));
    int const mz = d == 3 ? M : 0;
    int const my = d >= 2 ? M : 0;
    for (int z = -mz; z <= mz; ++z)
        for (int y = -my; y <= my; ++y)
            for (int x = -M; x <= M; ++x)
            {
                std::array<int, 3> e{x, y, z};
                if (d == 2)
                    e = {x, y, 0};
                shells[norm2i(e)].push_back(e);
            }
    double const area = sphere_area(d - 1);
    double const h = grid.h();
    std::size_t n_diff = 1;
    for (int a = 0; a < d; ++a)
        n_diff *= span_;
    offset_.assign(n_diff + 1, 0);
    for (std::size_t D = 0; D < n_diff; ++D)
    {
        offset_[D] = entries_.size();
        std::array<int, 3> dv{0, 0, 0};
        std::size_t r = D;
        for (int a = d - 1; a >= 0; --a)
        {
            dv[a] = static_cast<int>(r % span_) - (N - 1);
            r /= span_;
        }
        int const n2 = norm2i(dv);
        if (n2 == 0)
            continue;
        double const z = std::sqrt(double(n2)) * h;
        std::size_t count = 0;
        for (const auto& e : shells[n2])
            if (same_parity(e, dv))
                ++count;
        double const rate = k.phi(z) * area / static_cast<double>(count);
        for (const auto& e : shells[n2])
        {
            if (!same_parity(e, dv))
                continue;
            std::array<int, 3> half{(dv[0] + e[0]) / 2, (dv[1] + e[1]) / 2, (dv[2] + e[2]) / 2};
            bool fits = true;
            for (int a = 0; a < d; ++a)
                fits = fits && std::abs(half[a]) <= N - 1;
            if (!fits)
                continue;
            double c = (dv[0] * e[0] + dv[1] * e[1] + dv[2] * e[2]) / double(n2);
            double theta = std::acos(std::clamp(c, -1.0, 1.0));
            double w = rate * k.b(theta);
            if (w > 0)
                entries_.push_back({half, w});
        }
    }
    offset_[n_diff] = entries_.size();
}

double DvmCollision::evaluate(const double* f, double* gain, double* loss) const
{
    int const d = grid_.dim;
    int const N = grid_.nv;
    std::size_t const n = grid_.size();
    double const hd = grid_.cell_volume();
    std::vector<std::array<int, 3>> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = grid_.multi_index(i);
    std::size_t const chunks = std::min<std::size_t>(n, 64);
    std::vector<double> chunk_max(chunks, 0);
    parallel_chunks(chunks, [&](std::size_t c) {
        std::size_t const lo = n * c / chunks, hi = n * (c + 1) / chunks;
        for (std::size_t i = lo; i < hi; ++i)
        {
            const auto& a = idx[i];
            double g = 0, l = 0;
            for (std::size_t j = 0; j < n; ++j)
            {
                double const fj = f[j];
                const auto& b = idx[j];
                std::size_t D = 0;
                for (int q = 0; q < d; ++q)
                    D = D * span_ + static_cast<std::size_t>(a[q] - b[q] + N - 1);
                for (std::size_t e = offset_[D]; e < offset_[D + 1]; ++e)
                {
                    const Entry& en = entries_[e];
                    std::size_t kf = 0, lf = 0;
                    bool ok = true;
                    for (int q = 0; q < d; ++q)
                    {
                        int kq = b[q] + en.half[q];
                        int lq = a[q] - en.half[q];
                        ok = ok && kq >= 0 && kq < N && lq >= 0 && lq < N;
                        kf = kf * N + static_cast<std::size_t>(kq);
                        lf = lf * N + static_cast<std::size_t>(lq);
                    }
                    if (!ok)
                        continue;
                    g += en.w * f[kf] * f[lf];
                    l += en.w * fj;
                }
            }
            gain[i] = hd * g;
            loss[i] = hd * l;
            chunk_max[c] = std::max(chunk_max[c], loss[i]);
        }
    });
    return *std::max_element(chunk_max.begin(), chunk_max.end());
}

double state_mass(const KineticState& s)
{
    double const hd = s.vgrid.cell_volume();
    std::size_t const nv = s.n_nodes();
    double m = 0;
    for (std::size_t c = 0; c < s.n_cells(); ++c)
    {
        double acc = 0;
        for (std::size_t i = 0; i < nv; ++i)
            acc += s.f[c * nv + i];
        m += acc * hd * (s.nx ? s.cell_w[c] : 1.0);
    }
    return m;
}

double state_energy(const KineticState& s)
{
    double const hd = s.vgrid.cell_volume();
    std::size_t const nv = s.n_nodes();
    std::vector<double> v2(nv);
    for (std::size_t i = 0; i < nv; ++i)
        v2[i] = norm2(s.vgrid.node(i));
    double e = 0;
    for (std::size_t c = 0; c < s.n_cells(); ++c)
    {
        double acc = 0;
        for (std::size_t i = 0; i < nv; ++i)
            acc += v2[i] * s.f[c * nv + i];
        e += acc * hd * (s.nx ? s.cell_w[c] : 1.0);
    }
    return e;
}

double state_min(const KineticState& s) { return *std::min_element(s.f.begin(), s.f.end()); }

double lower_bound_ratio(const KineticState& s, double rho, double theta)
{
    VF_REQUIRE(rho > 0 && theta > 0, invalid_argument, "certificate needs rho > 0 and theta > 0");
    int const d = s.vgrid.dim;
    std::size_t const nv = s.n_nodes();
    double const log_pref = std::log(rho) - 0.5 * d * std::log(2 * kPi * theta);
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nv; ++i)
    {
        double const log_m = log_pref - norm2(s.vgrid.node(i)) / (2 * theta);
        double const m = std::exp(log_m);
        if (m == 0)
            continue;
        for (std::size_t c = 0; c < s.n_cells(); ++c)
            r = std::min(r, s.f[c * nv + i] / m);
    }
    return r;
}

double min_over_ball(const KineticState& s, const Vec& c, double r)
{
    std::size_t const nv = s.n_nodes();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nv; ++i)
    {
        if (norm(s.vgrid.node(i) - c) > r)
            continue;
        for (std::size_t q = 0; q < s.n_cells(); ++q)
            m = std::min(m, s.f[q * nv + i]);
    }
    VF_REQUIRE(std::isfinite(m), empty_target_ball, "no velocity node in the ball");
    return m;
}

double min_ball_integral(const KineticState& s, const Vec& c, double r)
{
    std::size_t const nv = s.n_nodes();
    double const hd = s.vgrid.cell_volume();
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < nv; ++i)
        if (norm(s.vgrid.node(i) - c) <= r)
            in.push_back(i);
    VF_REQUIRE(!in.empty(), empty_target_ball, "no velocity node in the ball");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < s.n_cells(); ++q)
    {
        double acc = 0;
        for (auto i : in)
            acc += s.f[q * nv + i];
        m = std::min(m, acc * hd);
    }
    return m;
}

namespace {

struct Tracker
{
    double m0 = 0, e0 = 0;
    long clips = 0;

    KineticDiagnostics record(KineticState& s, const SimOptions& opt, long extrap)
    {
        KineticDiagnostics d;
        d.t = s.t;
        d.min_before_clip = state_min(s);
        VF_REQUIRE(d.min_before_clip >= -1e-14, stability_violation,
                   "negative values beyond round-off before clipping");
        for (auto& x : s.f)
            if (x < 0)
            {
                x = 0;
                ++clips;
            }
        d.mass = state_mass(s);
        d.energy = state_energy(s);
        d.min_f = state_min(s);
        d.lb_ratio = opt.rho > 0 && opt.theta > 0 ? lower_bound_ratio(s, opt.rho, opt.theta)
                                                  : std::numeric_limits<double>::quiet_NaN();
        if (m0 == 0 && e0 == 0)
        {
            m0 = d.mass;
            e0 = d.energy;
        }
        d.mass_drift = m0 > 0 ? std::abs(d.mass - m0) / m0 : 0;
        d.energy_drift = e0 > 0 ? std::abs(d.energy - e0) / e0 : 0;
        d.clip_events = clips;
        d.extrapolations = extrap;
        return d;
    }
};

void check_options(const SimOptions& opt)
{
    VF_REQUIRE(opt.T >= 0 && opt.dt > 0, invalid_argument, "need T >= 0 and dt > 0");
}

int step_count(const SimOptions& opt)
{
    return static_cast<int>(std::ceil(opt.T / opt.dt - 1e-9));
}

void push(Trajectory& tr, const KineticDiagnostics& d)
{
    tr.series.push_back(d);
    tr.max_mass_drift = std::max(tr.max_mass_drift, d.mass_drift);
    tr.max_energy_drift = std::max(tr.max_energy_drift, d.energy_drift);
}

void stability_check(double max_loss, double dt)
{
    VF_REQUIRE(dt * max_loss <= 0.5, stability_violation,
               "dt exceeds 1 / (2 max L) = " + std::to_string(0.5 / max_loss));
}

}  // namespace

Trajectory homogeneous_solve(const Kernel& k, const GridFunction& f0, const SimOptions& opt)
{
    check_options(opt);
    KineticState s;
    s.vgrid = f0.grid();
    s.f = f0.values();
    VF_REQUIRE(state_min(s) >= 0, invalid_argument, "initial datum must be nonnegative");
    DvmCollision Q(k, s.vgrid);
    std::size_t const n = s.n_nodes();
    std::vector<double> gain(n), loss(n);
    Trajectory tr;
    Tracker tk;
    push(tr, tk.record(s, opt, 0));
    int const steps = step_count(opt);
    for (int st = 0; st < steps; ++st)
    {
        double const dt = std::min(opt.dt, opt.T - s.t);
        if (opt.collisions)
        {
            stability_check(Q.evaluate(s.f.data(), gain.data(), loss.data()), dt);
            for (std::size_t i = 0; i < n; ++i)
                s.f[i] += dt * (gain[i] - loss[i] * s.f[i]);
        }
        s.t = st + 1 == steps ? opt.T : s.t + dt;
        push(tr, tk.record(s, opt, 0));
        if (opt.snapshot_every > 0 && (st + 1) % opt.snapshot_every == 0)
            tr.snapshots.push_back(s);
    }
    tr.clip_events = tk.clips;
    tr.final_state = std::move(s);
    return tr;
}

namespace {

struct Box
{
    Vec lo;
    double hx = 0;
    bool torus = false;
};

Box box_of(const ConvexDomain& dom, int nx)
{
    Box b;
    b.torus = dom.is_torus();
    if (b.torus)
    {
        VF_REQUIRE(dom.axes()[0] == dom.axes()[1], invalid_argument,
                   "spatial solver needs a square period box");
        b.lo = Vec(0, 0);
        b.hx = dom.axes()[0] / nx;
    }
    else
    {
        double const R = dom.bounding_radius();
        b.lo = dom.center() - Vec(R, R);
        b.hx = 2 * R / nx;
    }
    return b;
}

Vec box_center(const Box& b, int i, int j)
{
    return Vec(b.lo[0] + (i + 0.5) * b.hx, b.lo[1] + (j + 0.5) * b.hx);
}

}  // namespace

KineticState make_spatial_state(const ConvexDomain& dom, int nx, const VelocityGrid& vg)
{
    VF_REQUIRE(dom.dim() == 2 && vg.dim == 2, invalid_argument, "spatial solver is two-dimensional");
    VF_REQUIRE(nx >= 4 && nx <= 48 && vg.nv <= 32, invalid_argument,
               "spatial solver grids are limited to 48^2 x 32^2");
    validate(vg);
    Box const b = box_of(dom, nx);
    KineticState s;
    s.vgrid = vg;
    s.nx = nx;
    std::vector<int> active(static_cast<std::size_t>(nx * nx), -1);
    for (int j = 0; j < nx; ++j)
        for (int i = 0; i < nx; ++i)
        {
            Vec c = box_center(b, i, j);
            if (b.torus || dom.signed_distance(c) < 0)
            {
                active[i + nx * j] = static_cast<int>(s.cells.size());
                s.cells.push_back(c);
                s.cell_box.push_back(i + nx * j);
                s.cell_w.push_back(b.hx * b.hx);
            }
        }
    VF_REQUIRE(!s.cells.empty(), invalid_argument, "no active cells");
    if (!b.torus)
    {
        // area fractions from 16 x 16 subsamples; cut cells without an
        // interior centre are lumped onto the nearest active cell
        constexpr int sub = 16;
        std::fill(s.cell_w.begin(), s.cell_w.end(), 0.0);
        double const sa = b.hx * b.hx / (sub * sub);
        for (int j = 0; j < nx; ++j)
            for (int i = 0; i < nx; ++i)
            {
                int inside = 0;
                for (int q = 0; q < sub; ++q)
                    for (int p = 0; p < sub; ++p)
                    {
                        Vec x(b.lo[0] + (i + (p + 0.5) / sub) * b.hx,
                              b.lo[1] + (j + (q + 0.5) / sub) * b.hx);
                        inside += dom.signed_distance(x) < 0;
                    }
                if (!inside)
                    continue;
                int tgt = active[i + nx * j];
                if (tgt < 0)
                {
                    Vec c = box_center(b, i, j);
                    double best = std::numeric_limits<double>::infinity();
                    for (std::size_t a = 0; a < s.cells.size(); ++a)
                    {
                        double dd = norm2(s.cells[a] - c);
                        if (dd < best)
                        {
                            best = dd;
                            tgt = static_cast<int>(a);
                        }
                    }
                }
                s.cell_w[tgt] += inside * sa;
            }
    }
    s.f.assign(s.cells.size() * vg.size(), 0.0);
    return s;
}

namespace {

struct Foot
{
    std::array<int, 4> cell;
    std::array<double, 4> wc;
    std::array<int, 4> node;
    std::array<double, 4> wv;
};

class TransportSweep
{
  public:
    TransportSweep(const ConvexDomain& dom, const KineticState& s, double dt)
        : nv_(s.n_nodes()), w_(s.cell_w)
    {
        Box const b = box_of(dom, s.nx);
        int const nx = s.nx;
        // nearest active cell for every box cell
        std::vector<int> map(static_cast<std::size_t>(nx * nx), -1);
        for (std::size_t a = 0; a < s.cells.size(); ++a)
            map[s.cell_box[a]] = static_cast<int>(a);
        std::vector<bool> ghost(map.size(), false);
        for (int q = 0; q < nx * nx; ++q)
        {
            if (map[q] >= 0)
                continue;
            ghost[q] = true;
            Vec c = box_center(b, q % nx, q / nx);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < s.cells.size(); ++a)
            {
                double dd = norm2(s.cells[a] - c);
                if (dd < best)
                {
                    best = dd;
                    map[q] = static_cast<int>(a);
                }
            }
        }
        const VelocityGrid& vg = s.vgrid;
        double const hv = vg.h();
        int const N = vg.nv;
        feet_.resize(s.cells.size() * nv_);
        std::vector<long> ext(s.cells.size(), 0);
        parallel_chunks(s.cells.size(), [&](std::size_t c) {
            for (std::size_t i = 0; i < nv_; ++i)
            {
                Vec const v = vg.node(i);
                Characteristic ch = characteristic_at(dom, s.cells[c], v, dt);
                Vec const X = ch.state.x;
                Vec const W = ch.state.v;
                Foot& ft = feet_[c * nv_ + i];
                // spatial bilinear stencil
                double ux = (X[0] - b.lo[0]) / b.hx - 0.5;
                double uy = (X[1] - b.lo[1]) / b.hx - 0.5;
                int ix = static_cast<int>(std::floor(ux));
                int iy = static_cast<int>(std::floor(uy));
                double fx = ux - ix, fy = uy - iy;
                bool extrap = false;
                for (int q = 0; q < 4; ++q)
                {
                    int jx = ix + (q & 1), jy = iy + (q >> 1);
                    if (b.torus)
                    {
                        jx = ((jx % nx) + nx) % nx;
                        jy = ((jy % nx) + nx) % nx;
                    }
                    else
                    {
                        jx = std::clamp(jx, 0, nx - 1);
                        jy = std::clamp(jy, 0, nx - 1);
                    }
                    double w = ((q & 1) ? fx : 1 - fx) * ((q >> 1) ? fy : 1 - fy);
                    ft.cell[q] = map[jx + nx * jy];
                    ft.wc[q] = w;
                    extrap = extrap || (w > 0 && ghost[jx + nx * jy]);
                }
                ext[c] += extrap;
                // velocity bilinear stencil
                double vx = W[0] / hv + N / 2;
                double vy = W[1] / hv + N / 2;
                int kx = static_cast<int>(std::floor(vx));
                int ky = static_cast<int>(std::floor(vy));
                double gx = vx - kx, gy = vy - ky;
                for (int q = 0; q < 4; ++q)
                {
                    int jx = kx + (q & 1), jy = ky + (q >> 1);
                    double w = ((q & 1) ? gx : 1 - gx) * ((q >> 1) ? gy : 1 - gy);
                    if (jx < 0 || jx >= N || jy < 0 || jy >= N)
                    {
                        ft.node[q] = 0;
                        ft.wv[q] = 0;
                        continue;
                    }
                    ft.node[q] = jx * N + jy;
                    ft.wv[q] = w;
                }
            }
        });
        for (long e : ext)
            extrapolations_ += e;
    }

    //! Deposit each (cell, node) mass at its forward foot with bilinear weights
    void apply(const std::vector<double>& in, std::vector<double>& out) const
    {
        std::size_t const nc = in.size() / nv_;
        std::vector<std::vector<double>> part(kParts);
        parallel_chunks(kParts, [&](std::size_t p) {
            auto& buf = part[p];
            buf.assign(in.size(), 0.0);
            std::size_t const lo = nc * p / kParts, hi = nc * (p + 1) / kParts;
            for (std::size_t c = lo; c < hi; ++c)
                for (std::size_t i = 0; i < nv_; ++i)
                {
                    double const m = in[c * nv_ + i] * w_[c];
                    if (m == 0)
                        continue;
                    const Foot& ft = feet_[c * nv_ + i];
                    for (int a = 0; a < 4; ++a)
                    {
                        if (ft.wc[a] == 0)
                            continue;
                        double* row = &buf[static_cast<std::size_t>(ft.cell[a]) * nv_];
                        for (int q = 0; q < 4; ++q)
                            row[ft.node[q]] += m * ft.wc[a] * ft.wv[q];
                    }
                }
        });
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t i = 0; i < nv_; ++i)
            {
                double acc = 0;
                for (std::size_t p = 0; p < kParts; ++p)
                    acc += part[p][c * nv_ + i];
                out[c * nv_ + i] = acc / w_[c];
            }
    }

    long extrapolations() const { return extrapolations_; }

  private:
    static constexpr std::size_t kParts = 4;
    std::size_t nv_;
    std::vector<double> w_;
    std::vector<Foot> feet_;
    long extrapolations_ = 0;
};

}  // namespace

Trajectory inhomogeneous_solve(const ConvexDomain& dom, const Kernel& k, const PhaseInit& f0,
                               int nx, const VelocityGrid& vg, const SimOptions& opt)
{
    check_options(opt);
    VF_REQUIRE(dom.is_torus() || dom.name() == "disk", invalid_argument,
               "spatial solver supports the disk and the torus");
    KineticState s = make_spatial_state(dom, nx, vg);
    std::size_t const nv = s.n_nodes();
    for (std::size_t c = 0; c < s.cells.size(); ++c)
        for (std::size_t i = 0; i < nv; ++i)
        {
            double v = f0(s.cells[c], vg.node(i));
            VF_REQUIRE(v >= 0, invalid_argument, "initial datum must be nonnegative");
            s.f[c * nv + i] = v;
        }
    std::unique_ptr<DvmCollision> Q;
    if (opt.collisions)
        Q = std::make_unique<DvmCollision>(k, vg);
    Trajectory tr;
    Tracker tk;
    push(tr, tk.record(s, opt, 0));
    int const steps = step_count(opt);
    double const dt_last = opt.T - (steps - 1) * opt.dt;
    TransportSweep half(dom, s, 0.5 * opt.dt);
    std::unique_ptr<TransportSweep> half_last;
    if (steps > 0 && std::abs(dt_last - opt.dt) > 1e-12 * opt.dt)
        half_last = std::make_unique<TransportSweep>(dom, s, 0.5 * dt_last);
    std::vector<double> tmp(s.f.size());
    std::size_t const nc = s.cells.size();
    long extrap = 0;
    for (int st = 0; st < steps; ++st)
    {
        bool const last = st + 1 == steps;
        const TransportSweep& sw = last && half_last ? *half_last : half;
        double const dt = last ? dt_last : opt.dt;
        sw.apply(s.f, tmp);
        if (Q)
        {
            std::vector<double> cmax(nc, 0);
            std::vector<double> fnew(tmp.size());
            parallel_chunks(nc, [&](std::size_t c) {
                std::vector<double> g(nv), l(nv);
                cmax[c] = Q->evaluate(&tmp[c * nv], g.data(), l.data());
                for (std::size_t i = 0; i < nv; ++i)
                    fnew[c * nv + i] = tmp[c * nv + i] + dt * (g[i] - l[i] * tmp[c * nv + i]);
            });
            stability_check(*std::max_element(cmax.begin(), cmax.end()), dt);
            tmp.swap(fnew);
        }
        sw.apply(tmp, s.f);
        extrap += 2 * sw.extrapolations();
        s.t = last ? opt.T : s.t + dt;
        push(tr, tk.record(s, opt, extrap));
        if (opt.snapshot_every > 0 && (st + 1) % opt.snapshot_every == 0)
            tr.snapshots.push_back(s);
    }
    tr.clip_events = tk.clips;
    tr.final_state = std::move(s);
    return tr;
}

namespace {

template <class T>
void put(std::ofstream& o, T x)
{
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &x, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    o.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::ifstream& in)
{
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    VF_REQUIRE(in.good(), io_error, "truncated snapshot");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T x;
    std::memcpy(&x, buf, sizeof(T));
    return x;
}

}  // namespace

void write_snapshot(const std::string& path, const KineticState& s)
{
    std::ofstream o(path, std::ios::binary);
    VF_REQUIRE(o.good(), io_error, "cannot open " + path);
    std::uint32_t const d = static_cast<std::uint32_t>(s.vgrid.dim);
    std::vector<std::uint32_t> dims;
    std::size_t const nv = s.n_nodes();
    if (s.nx)
        dims = {std::uint32_t(s.nx), std::uint32_t(s.nx)};
    for (int a = 0; a < s.vgrid.dim; ++a)
        dims.push_back(std::uint32_t(s.vgrid.nv));
    put(o, d);
    put(o, std::uint32_t(dims.size()));
    for (auto x : dims)
        put(o, x);
    put(o, s.t);
    if (!s.nx)
    {
        for (double x : s.f)
            put(o, x);
    }
    else
    {
        std::vector<double> full(static_cast<std::size_t>(s.nx * s.nx) * nv, 0.0);
        for (std::size_t c = 0; c < s.cells.size(); ++c)
        {
            // box index i + nx j -> row-major (i, j)
            int const bi = s.cell_box[c] % s.nx, bj = s.cell_box[c] / s.nx;
            std::size_t const r = static_cast<std::size_t>(bi * s.nx + bj);
            std::copy_n(&s.f[c * nv], nv, &full[r * nv]);
        }
        for (double x : full)
            put(o, x);
    }
    VF_REQUIRE(o.good(), io_error, "write failed for " + path);
}

Snapshot read_snapshot(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    VF_REQUIRE(in.good(), io_error, "cannot open " + path);
    Snapshot s;
    s.d = get<std::uint32_t>(in);
    std::uint32_t rank = get<std::uint32_t>(in);
    VF_REQUIRE(rank >= 1 && rank <= 5, io_error, "bad snapshot rank");
    std::size_t n = 1;
    for (std::uint32_t i = 0; i < rank; ++i)
    {
        s.dims.push_back(get<std::uint32_t>(in));
        n *= s.dims.back();
    }
    s.t = get<double>(in);
    s.values.resize(n);
    for (auto& x : s.values)
        x = get<double>(in);
    return s;
}

}  // namespace vf
