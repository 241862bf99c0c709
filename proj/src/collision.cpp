// SPDX-License-Identifier: Apache-2.0
#include "vf/collision.hpp"

#include <algorithm>
#include <cmath>

#include "vf/error.hpp"
#include "vf/parallel.hpp"
#include "vf/rng.hpp"
#include "vf/simd/kernels.hpp"

namespace vf {

namespace {

constexpr double pi = std::numbers::pi;

template <std::size_t K, class F>
std::array<McEstimate, K> run_mc(const McSpec& mc, F&& sample)
{
    VF_REQUIRE(mc.samples >= 2 && mc.chunk >= 1, invalid_argument, "too few MC samples");
    std::size_t n_chunks = (mc.samples + mc.chunk - 1) / mc.chunk;
    std::vector<std::array<double, 2 * K>> part(n_chunks);
    CounterRng base(mc.seed, mc.stream);
    parallel_chunks(n_chunks, [&](std::size_t c) {
        CounterRng rng = base.split(c);
        std::uint64_t n = std::min<std::uint64_t>(mc.chunk, mc.samples - c * mc.chunk);
        std::array<double, 2 * K> acc{};
        for (std::uint64_t i = 0; i < n; ++i)
        {
            std::array<double, K> x = sample(rng);
            for (std::size_t j = 0; j < K; ++j)
            {
                acc[2 * j] += x[j];
                acc[2 * j + 1] += x[j] * x[j];
            }
        }
        part[c] = acc;
    });
    std::array<double, 2 * K> tot{};
    for (const auto& p : part)
        for (std::size_t j = 0; j < 2 * K; ++j)
            tot[j] += p[j];
    std::array<McEstimate, K> out;
    double n = static_cast<double>(mc.samples);
    for (std::size_t j = 0; j < K; ++j)
    {
        double mean = tot[2 * j] / n;
        double var = std::max(0.0, (tot[2 * j + 1] / n - mean * mean) * n / (n - 1));
        out[j].value = mean;
        out[j].stderr_ = std::sqrt(var / n);
        out[j].samples = mc.samples;
    }
    return out;
}

// Unit vectors e1, e2 orthogonal to the unit vector k (d = 3)
void orthonormal_pair(const Vec& k, Vec& e1, Vec& e2)
{
    Vec a = std::abs(k[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
    e1 = normalized(a - dot(a, k) * k);
    e2 = cross(k, e1);
}

// Random unit vector orthogonal to k; phi is the azimuth in [0, 2 pi)
Vec perpendicular(int dim, const Vec& k, double phi)
{
    if (dim == 2)
    {
        Vec w{-k[1], k[0], 0};
        return phi < pi ? w : -1.0 * w;
    }
    Vec e1, e2;
    orthonormal_pair(k, e1, e2);
    return std::cos(phi) * e1 + std::sin(phi) * e2;
}

Vec uniform_in_box(int dim, const Vec& lo, const Vec& hi, CounterRng& rng)
{
    Vec x{};
    for (int a = 0; a < dim; ++a)
        x[a] = lo[a] + (hi[a] - lo[a]) * rng.uniform();
    return x;
}

double box_volume(int dim, const Vec& lo, const Vec& hi)
{
    double v = 1;
    for (int a = 0; a < dim; ++a)
        v *= std::max(0.0, hi[a] - lo[a]);
    return v;
}

double ball_volume(int dim, double r)
{
    return sphere_area(dim - 1) * std::pow(r, dim) / dim;
}

double jb(const Vec& v) { return std::sqrt(1 + norm2(v)); }

void check_same_grid(const GridFunction& a, const GridFunction& b)
{
    VF_REQUIRE(a.grid() == b.grid(), grid_mismatch, "grid functions live on different grids");
}

void check_kernel_grid(const Kernel& k, const GridFunction& g)
{
    VF_REQUIRE(k.dim() == g.grid().dim, grid_mismatch, "kernel and grid dimensions differ");
}

double catmull_rom(double t, int j)
{
    // weights for offsets -1, 0, 1, 2
    double t2 = t * t, t3 = t2 * t;
    switch (j)
    {
    case 0:
        return 0.5 * (-t3 + 2 * t2 - t);
    case 1:
        return 0.5 * (3 * t3 - 5 * t2 + 2);
    case 2:
        return 0.5 * (-3 * t3 + 4 * t2 + t);
    default:
        return 0.5 * (t3 - t2);
    }
}

}  // namespace

double VelocityGrid::cell_volume() const { return std::pow(h(), dim); }

std::size_t VelocityGrid::size() const
{
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a)
        n *= static_cast<std::size_t>(nv);
    return n;
}

std::array<int, 3> VelocityGrid::multi_index(std::size_t flat) const
{
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a)
    {
        idx[a] = static_cast<int>(flat % nv);
        flat /= nv;
    }
    return idx;
}

std::size_t VelocityGrid::flat_index(const std::array<int, 3>& idx) const
{
    std::size_t f = 0;
    for (int a = 0; a < dim; ++a)
        f = f * nv + idx[a];
    return f;
}

Vec VelocityGrid::node(std::size_t flat) const
{
    auto idx = multi_index(flat);
    Vec v{};
    for (int a = 0; a < dim; ++a)
        v[a] = (idx[a] - nv / 2) * h();
    return v;
}

std::size_t VelocityGrid::nearest(const Vec& v) const
{
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a)
    {
        int i = static_cast<int>(std::lround(v[a] / h())) + nv / 2;
        if (i < 0 || i >= nv)
            return size();
        idx[a] = i;
    }
    return flat_index(idx);
}

void validate(const VelocityGrid& g)
{
    VF_REQUIRE(g.dim == 2 || g.dim == 3, invalid_argument, "grid dimension must be 2 or 3");
    VF_REQUIRE(g.nv >= 2 && g.nv % 2 == 0, invalid_argument, "N_v must be even and >= 2");
    VF_REQUIRE(g.rv > 0, invalid_argument, "R_v must be positive");
}

GridFunction::GridFunction(const VelocityGrid& grid) : grid_(grid)
{
    validate(grid);
    values_.assign(grid.size(), 0.0);
}

GridFunction::GridFunction(const VelocityGrid& grid, const std::function<double(const Vec&)>& f)
    : GridFunction(grid)
{
    for (std::size_t i = 0; i < values_.size(); ++i)
        values_[i] = f(grid_.node(i));
}

double GridFunction::interp(const Vec& v) const
{
    const int d = grid_.dim, n = grid_.nv;
    const double h = grid_.h();
    int base[3] = {0, 0, 0};
    double fr[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a)
    {
        double u = v[a] / h + n / 2;
        double fl = std::floor(u);
        if (fl < -1 || fl > n - 1)
            return 0;
        base[a] = static_cast<int>(fl);
        fr[a] = u - fl;
    }
    double s = 0;
    for (int corner = 0; corner < (1 << d); ++corner)
    {
        double w = 1;
        std::array<int, 3> idx{0, 0, 0};
        bool inside = true;
        for (int a = 0; a < d; ++a)
        {
            int bit = (corner >> a) & 1;
            idx[a] = base[a] + bit;
            w *= bit ? fr[a] : 1 - fr[a];
            if (idx[a] < 0 || idx[a] >= n)
                inside = false;
        }
        if (inside && w != 0)
            s += w * values_[grid_.flat_index(idx)];
    }
    return s;
}

double GridFunction::interp_cubic(const Vec& v) const
{
    const int d = grid_.dim, n = grid_.nv;
    const double h = grid_.h();
    int base[3] = {0, 0, 0};
    double wt[3][4] = {};
    for (int a = 0; a < d; ++a)
    {
        double u = v[a] / h + n / 2;
        double fl = std::floor(u);
        if (fl < -2 || fl > n)
            return 0;
        base[a] = static_cast<int>(fl);
        for (int j = 0; j < 4; ++j)
            wt[a][j] = catmull_rom(u - fl, j);
    }
    double s = 0;
    int total = d == 3 ? 64 : 16;
    for (int c = 0; c < total; ++c)
    {
        double w = 1;
        std::array<int, 3> idx{0, 0, 0};
        bool inside = true;
        int cc = c;
        for (int a = 0; a < d; ++a)
        {
            int j = cc & 3;
            cc >>= 2;
            idx[a] = base[a] - 1 + j;
            w *= wt[a][j];
            if (idx[a] < 0 || idx[a] >= n)
                inside = false;
        }
        if (inside)
            s += w * values_[grid_.flat_index(idx)];
    }
    return s;
}

double GridFunction::weighted_l1(double k) const
{
    double s = 0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] != 0)
            s += std::pow(1 + norm2(grid_.node(i)), k / 2) * std::abs(values_[i]);
    return s * grid_.cell_volume();
}

double GridFunction::w2inf_norm() const
{
    const int d = grid_.dim, n = grid_.nv;
    const double h = grid_.h();
    auto at = [&](std::array<int, 3> idx) {
        for (int a = 0; a < d; ++a)
            if (idx[a] < 0 || idx[a] >= n)
                return 0.0;
        return values_[grid_.flat_index(idx)];
    };
    double m = 0;
    for (std::size_t f = 0; f < values_.size(); ++f)
    {
        auto i = grid_.multi_index(f);
        double c = values_[f];
        m = std::max(m, std::abs(c));
        for (int a = 0; a < d; ++a)
        {
            auto p = i, q = i;
            p[a] += 1;
            q[a] -= 1;
            m = std::max(m, std::abs(at(p) - at(q)) / (2 * h));
            m = std::max(m, std::abs(at(p) - 2 * c + at(q)) / (h * h));
            for (int b = a + 1; b < d; ++b)
            {
                auto pp = i, pm = i, mp = i, mm = i;
                pp[a] += 1, pp[b] += 1;
                pm[a] += 1, pm[b] -= 1;
                mp[a] -= 1, mp[b] += 1;
                mm[a] -= 1, mm[b] -= 1;
                m = std::max(m, std::abs(at(pp) - at(pm) - at(mp) + at(mm)) / (4 * h * h));
            }
        }
    }
    return m;
}

bool GridFunction::support_box(Vec& lo, Vec& hi) const
{
    const int d = grid_.dim;
    std::array<int, 3> mn{grid_.nv, grid_.nv, grid_.nv}, mx{-1, -1, -1};
    bool any = false;
    for (std::size_t f = 0; f < values_.size(); ++f)
    {
        if (values_[f] == 0)
            continue;
        any = true;
        auto i = grid_.multi_index(f);
        for (int a = 0; a < d; ++a)
        {
            mn[a] = std::min(mn[a], i[a]);
            mx[a] = std::max(mx[a], i[a]);
        }
    }
    lo = Vec{};
    hi = Vec{};
    if (!any)
        return false;
    const double h = grid_.h();
    for (int a = 0; a < d; ++a)
    {
        lo[a] = (mn[a] - 1 - grid_.nv / 2) * h;
        hi[a] = (mx[a] + 1 - grid_.nv / 2) * h;
    }
    return true;
}

McEstimate eval_qplus(const Kernel& k, const GridFunction& g, const GridFunction& h,
                      const Vec& v, const McSpec& mc, ThetaRange range)
{
    check_same_grid(g, h);
    check_kernel_grid(k, g);
    VF_REQUIRE(mc.samples >= 10000, invalid_argument, "eval_qplus needs at least 1e4 samples");
    VF_REQUIRE(range.lo >= 0 && range.lo < range.hi && range.hi <= pi, invalid_argument,
               "theta range must satisfy 0 <= lo < hi <= pi");
    VF_REQUIRE(k.is_cutoff() || range.lo > 0, not_non_cutoff,
               "non-cutoff kernels need a positive lower angle");
    const int d = k.dim();
    Vec glo, ghi, hlo, hhi;
    if (!g.support_box(glo, ghi) || !h.support_box(hlo, hhi))
        return McEstimate{0, 0, mc.samples};
    // v_* = v' + v'_* - v
    Vec lo = glo + hlo - v, hi = ghi + hhi - v;
    const double vol = box_volume(d, lo, hi);
    const double clo = std::cos(range.lo), chi = std::cos(range.hi);
    const double band = d == 3 ? 2 * pi * (clo - chi) : 2 * (range.hi - range.lo);
    auto res = run_mc<1>(mc, [&](CounterRng& rng) -> std::array<double, 1> {
        Vec vs = uniform_in_box(d, lo, hi, rng);
        double th = d == 3 ? std::acos(chi + (clo - chi) * rng.uniform())
                           : range.lo + (range.hi - range.lo) * rng.uniform();
        double phi = 2 * pi * rng.uniform();
        Vec rel = v - vs;
        double dist = norm(rel);
        if (dist == 0)
            return {0.0};
        Vec kk = (1.0 / dist) * rel;
        Vec sigma = std::cos(th) * kk + std::sin(th) * perpendicular(d, kk, phi);
        Vec c = 0.5 * (v + vs);
        Vec vp = c + (0.5 * dist) * sigma;
        Vec vps = c - (0.5 * dist) * sigma;
        double hv = h.interp(vp);
        if (hv == 0)
            return {0.0};
        double gv = g.interp(vps);
        if (gv == 0)
            return {0.0};
        return {vol * band * k.phi(dist) * k.b(th) * hv * gv};
    });
    return res[0];
}

double loss_angular_mass(const Kernel& k, double eps)
{
    if (k.is_cutoff())
        return k.n_b_full(AngularMeasure::sphere);
    VF_REQUIRE(eps > 0, not_non_cutoff, "non-cutoff loss needs a cutoff angle eps > 0");
    return angular_masses(k, eps, AngularMeasure::sphere).n_b_co;
}

double eval_loss(const Kernel& k, const GridFunction& g, const Vec& v, double eps)
{
    check_kernel_grid(k, g);
    const double nb = loss_angular_mass(k, eps);
    const VelocityGrid& grid = g.grid();
    std::vector<double> px, py, pz, w;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        double x = g[i];
        if (x == 0)
            continue;
        Vec n = grid.node(i);
        px.push_back(n[0]);
        py.push_back(n[1]);
        pz.push_back(n[2]);
        w.push_back(x);
    }
    double sum = 0;
    if (k.params().phi_kind == PhiKind::power)
    {
        double q[3] = {v[0], v[1], v[2]};
        sum = k.params().phi_scale
              * simd::weighted_power_sum(grid.dim, w.size(), px.data(), py.data(), pz.data(),
                                         w.data(), q, k.gamma());
    }
    else
    {
        for (std::size_t j = 0; j < w.size(); ++j)
            sum += w[j] * k.phi(norm(v - Vec{px[j], py[j], pz[j]}));
    }
    return nb * sum * grid.cell_volume();
}

SQ1 eval_s_and_q1(const Kernel& k, double eps, const GridFunction& g, const GridFunction& h,
                  const Vec& v, const McSpec& mc, double box_eps)
{
    VF_REQUIRE(k.nu() >= 0, not_non_cutoff, "S and Q1 require a non-cutoff kernel (nu >= 0)");
    VF_REQUIRE(eps > 0 && eps < pi / 4, invalid_argument, "eps must lie in (0, pi/4)");
    check_same_grid(g, h);
    check_kernel_grid(k, g);
    const int d = k.dim();
    Vec glo, ghi;
    if (!g.support_box(glo, ghi))
        return SQ1{{0, 0, mc.samples}, {0, 0, mc.samples}};
    double be = std::max(eps, box_eps);
    double margin = be * (norm(v) + 2 * std::sqrt(double(d)) * g.grid().rv);
    Vec lo = glo, hi = ghi;
    for (int a = 0; a < d; ++a)
    {
        lo[a] -= margin;
        hi[a] += margin;
    }
    const double vol = box_volume(d, lo, hi);
    const double nu = k.nu();
    const double az = k.azimuth_factor();
    const double hv = h.interp_cubic(v);
    const double th_floor = 1e-4 * eps;
    auto res = run_mc<2>(mc, [&](CounterRng& rng) -> std::array<double, 2> {
        Vec vs = uniform_in_box(d, lo, hi, rng);
        double th = eps * std::pow(rng.uniform_pos(), 1 / (2 - nu));
        double phi = pi * rng.uniform();
        Vec rel = v - vs;
        double dist = norm(rel);
        if (dist == 0)
            return {0.0, 0.0};
        double pdf = (2 - nu) * std::pow(th, 1 - nu) / std::pow(eps, 2 - nu);
        double wb = az * k.b(th) * std::pow(std::sin(th), d - 2) / pdf;
        // Below th_floor the symmetrised difference is O(th^2) and drowns in
        // rounding; evaluate at th_floor and rescale by the quadratic law.
        double th_eval = std::max(th, th_floor);
        wb *= (th / th_eval) * (th / th_eval);
        th = th_eval;
        double base = vol * wb * k.phi(dist);
        Vec kk = (1.0 / dist) * rel;
        Vec c = 0.5 * (v + vs);
        double gs = g.interp_cubic(vs);
        double s_acc = 0, q_acc = 0;
        // antithetic azimuths phi and phi + pi
        for (int side = 0; side < 2; ++side)
        {
            Vec w = perpendicular(d, kk, d == 2 ? (side ? 1.5 * pi : 0.5 * pi) : phi + side * pi);
            Vec sigma = std::cos(th) * kk + std::sin(th) * w;
            Vec vp = c + (0.5 * dist) * sigma;
            Vec vps = c - (0.5 * dist) * sigma;
            double gps = g.interp_cubic(vps);
            s_acc += -(gps - gs);
            q_acc += gps * (h.interp_cubic(vp) - hv);
        }
        return {0.5 * base * s_acc, 0.5 * base * q_acc};
    });
    return SQ1{res[0], res[1]};
}

McEstimate spreading_value(const Kernel& k, const Vec& vbar, double r, double R, const Vec& v,
                           const McSpec& mc)
{
    const int d = k.dim();
    const Vec center = 2.0 * vbar - v;
    const double rad = r + R;
    const double vol = ball_volume(d, rad);
    auto res = run_mc<1>(mc, [&](CounterRng& rng) -> std::array<double, 1> {
        Vec vs = center + rng.in_ball(d, rad);
        double s_draw = rng.uniform();
        double phi = 2 * pi * rng.uniform();
        Vec rel = v - vs;
        double dist = norm(rel);
        double rho = 0.5 * dist;
        if (rho == 0)
            return {0.0};
        Vec c = 0.5 * (v + vs);
        Vec off = vbar - c;
        double D = norm(off);
        Vec u;
        double t1, t2;
        if (D < 1e-14 * (1 + rho))
        {
            if (!(rho < r && rho < R))
                return {0.0};
            u = Vec{1, 0, 0};
            t1 = -1;
            t2 = 1;
        }
        else
        {
            u = (1.0 / D) * off;
            t1 = std::max(-1.0, (rho * rho + D * D - r * r) / (2 * rho * D));
            t2 = std::min(1.0, -(rho * rho + D * D - R * R) / (2 * rho * D));
        }
        if (t2 <= t1)
            return {0.0};
        double area, s;
        Vec w;
        if (d == 3)
        {
            area = 2 * pi * (t2 - t1);
            s = t1 + (t2 - t1) * s_draw;
            w = perpendicular(3, u, phi);
        }
        else
        {
            double a1 = std::acos(t2), a2 = std::acos(t1);
            area = 2 * (a2 - a1);
            s = std::cos(a1 + (a2 - a1) * s_draw);
            w = perpendicular(2, u, phi);
        }
        Vec sigma = s * u + std::sqrt(std::max(0.0, 1 - s * s)) * w;
        double cth = std::clamp(dot(sigma, (1.0 / dist) * rel), -1.0, 1.0);
        double th = std::acos(cth);
        if (th <= 0)
            return {0.0};
        return {vol * area * k.phi(dist) * k.b(th)};
    });
    return res[0];
}

SpreadingResult spreading_constant(const Kernel& k, const Vec& vbar, double r, double R,
                                   double xi, const VelocityGrid& grid, const McSpec& mc,
                                   double target_rel_se)
{
    VF_REQUIRE(r > 0 && r <= R, invalid_argument, "need 0 < r <= R");
    VF_REQUIRE(xi > 0 && xi < 1, invalid_argument, "xi must lie in (0, 1)");
    VF_REQUIRE(k.nu() <= 0, invalid_argument, "spreading requires nu <= 0");
    VF_REQUIRE(k.dim() == grid.dim, grid_mismatch, "kernel and grid dimensions differ");
    validate(grid);
    const int d = k.dim();
    const double target = std::sqrt(r * r + R * R) * (1 - xi);
    std::vector<Vec> nodes;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        Vec n = grid.node(i);
        if (norm(n - vbar) < target)
            nodes.push_back(n);
    }
    VF_REQUIRE(!nodes.empty(), empty_target_ball, "no grid node inside the target ball");

    std::vector<McEstimate> est(nodes.size());
    std::vector<std::uint64_t> n_samp(nodes.size(), mc.samples);
    auto run = [&](std::size_t i) {
        McSpec m = mc;
        m.samples = n_samp[i];
        m.stream = mc.stream * 1000003ull + i;
        est[i] = spreading_value(k, vbar, r, R, nodes[i], m);
    };
    for (std::size_t i = 0; i < nodes.size(); ++i)
        run(i);
    const std::uint64_t cap = mc.samples * 256;
    auto rel = [&](std::size_t i) {
        return est[i].value > 0 ? est[i].stderr_ / est[i].value
                                : std::numeric_limits<double>::infinity();
    };
    for (int round = 0; round < 16; ++round)
    {
        std::size_t imin = 0;
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (est[i].value < est[imin].value)
                imin = i;
        double bar = est[imin].value + 3 * est[imin].stderr_;
        bool refined = false;
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            bool contender = est[i].value - 3 * est[i].stderr_ <= bar;
            if (contender && rel(i) > target_rel_se && n_samp[i] < cap)
            {
                n_samp[i] *= 4;
                run(i);
                refined = true;
            }
        }
        if (!refined)
            break;
    }
    std::size_t imin = 0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        total += n_samp[i];
        if (est[i].value < est[imin].value)
            imin = i;
    }
    SpreadingResult out;
    out.scale = lower_constant(k) * k.params().c_phi * std::pow(r, d - 3)
                * std::pow(R, 3 + k.gamma()) * std::pow(xi, 0.5 * d - 1);
    out.min_value = est[imin].value;
    out.estimate = est[imin].value / out.scale;
    out.stderr_ = est[imin].stderr_ / out.scale;
    out.argmin = nodes[imin];
    out.nodes = nodes.size();
    out.samples = total;
    out.max_rel_se = rel(imin);
    return out;
}

BoundFit fit_bound_constants(const Kernel& k, double eps, const GridFunction& g,
                             const GridFunction& h, const std::vector<Vec>& probes,
                             const McSpec& mc)
{
    BoundFit out;
    const double cphi = k.params().C_phi;
    const double gp = std::max(k.gamma(), 0.0);
    const double gt = k.gamma_tilde();
    const double e_g = g.energy();
    VF_REQUIRE(e_g > 0, invalid_argument, "g must have positive energy");
    const double nb = loss_angular_mass(k, eps);
    for (const Vec& v : probes)
    {
        double l = std::abs(eval_loss(k, g, v, eps));
        out.c_loss = std::max(out.c_loss, l / (nb * cphi * e_g * std::pow(jb(v), gp)));
    }
    if (k.is_cutoff())
        return out;
    const double mb = angular_masses(k, eps, AngularMeasure::sphere).m_b_nco;
    const double gl1 = g.weighted_l1(gt);
    const double hw = h.w2inf_norm();
    std::uint64_t stream = 0;
    for (const Vec& v : probes)
    {
        McSpec m = mc;
        m.stream = mc.stream * 7919ull + stream++;
        SQ1 r = eval_s_and_q1(k, eps, g, h, v, m);
        double cs = std::abs(r.s.value) / (mb * cphi * e_g * std::pow(jb(v), gp));
        double cq = std::abs(r.q1.value) / (mb * cphi * gl1 * hw * std::pow(jb(v), gt));
        if (cs > out.c_s)
        {
            out.c_s = cs;
            out.s_rel_se = r.s.rel_se();
        }
        if (cq > out.c_q1)
        {
            out.c_q1 = cq;
            out.q1_rel_se = r.q1.rel_se();
        }
    }
    return out;
}

}  // namespace vf
