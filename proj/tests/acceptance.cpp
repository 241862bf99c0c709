// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vf/certificate.hpp"
#include "vf/characteristics.hpp"
#include "vf/cli.hpp"
#include "vf/collision.hpp"
#include "vf/error.hpp"
#include "vf/grazing.hpp"
#include "vf/kinetic.hpp"
#include "vf/transport.hpp"

using namespace vf;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::vector<ConvexDomain> shapes()
{
    return {ConvexDomain::disk({0, 0}, 1.0), ConvexDomain::ellipse({0, 0}, {2, 1}),
            ConvexDomain::superellipse({0, 0}, {1, 1}, 4),
            ConvexDomain::disk({0, 0, 0}, 1.0, 3),
            ConvexDomain::ellipse({0, 0, 0}, {1.5, 1.0, 0.7}, 3)};
}

std::string label(const ConvexDomain& d) { return d.name() + std::to_string(d.dim()) + "d"; }

// 1. reflection isometry and involution, norm preservation along flows
Outcome reflection_flow(double& seconds_budget)
{
    const int n = 1000000;
    double worst_iso = 0, worst_inv = 0, worst_norm = 0;
    long truncated = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& dom : shapes())
    {
        CounterRng rng(101, static_cast<int>(dom.shape()) + 10 * dom.dim());
        int d = dom.dim();
        for (int i = 0; i < n; ++i)
        {
            BoundarySample b = dom.sample_boundary(rng);
            Vec a = rng.unit_vector(d) * (0.1 + 3 * rng.uniform());
            Vec c = rng.unit_vector(d) * (0.1 + 3 * rng.uniform());
            Vec ra = specular_reflect(a, b.n), rc = specular_reflect(c, b.n);
            double scale = norm(a) * norm(c);
            worst_iso = std::max(worst_iso, std::abs(dot(ra, rc) - dot(a, c)) / scale);
            worst_inv = std::max(worst_inv, norm(specular_reflect(ra, b.n) - a) / norm(a));
            Vec x = dom.sample_interior(rng);
            double t = rng.uniform() * 2 * dom.diameter() / norm(a);
            Characteristic ch = characteristic_at(dom, x, a, t);
            truncated += ch.truncated;
            worst_norm = std::max(worst_norm, std::abs(norm(ch.state.v) - norm(a)) / norm(a));
        }
    }
    seconds_budget = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = std::max({worst_iso, worst_inv, worst_norm});
    return {worst <= 1e-10 && truncated == 0 && seconds_budget <= 60,
            fmt("5 shapes x 1e6 cases: isometry %.2e, involution %.2e, flow norm %.2e, "
                "truncated %ld, %.1f s (limit 60 s)",
                worst_iso, worst_inv, worst_norm, truncated, seconds_budget)};
}

// 2. reversibility outside the tangency band
Outcome reversibility()
{
    std::string detail;
    long failures = 0;
    double worst = 0;
    for (const auto& dom : shapes())
    {
        CounterRng rng(202, static_cast<int>(dom.shape()) + 10 * dom.dim());
        const double diam = dom.diameter();
        int checked = 0;
        long guard = 0;
        while (checked < 100000 && guard++ < 1000000)
        {
            Vec x = dom.sample_interior(rng);
            Vec v = rng.unit_vector(dom.dim()) * (0.2 + 2 * rng.uniform());
            double t = rng.uniform() * 2 * diam / norm(v);
            Characteristic c = characteristic_at(dom, x, v, t);
            Characteristic back = characteristic_at(dom, c.state.x, -c.state.v, t);
            if (std::min(c.min_incidence, back.min_incidence) <= 1e-6)
                continue;
            ++checked;
            double e = std::max(norm(back.state.x - x), norm(-back.state.v - v) / norm(v) * diam);
            worst = std::max(worst, e / diam);
            failures += e > 1e-8 * diam;
        }
        detail += fmt("%s %d ", label(dom).c_str(), checked);
        if (checked < 100000)
            ++failures;
    }
    return {failures == 0,
            fmt("samples [%s], failures %ld, worst error %.2e diameters", detail.c_str(), failures, worst)};
}

// 3. disk analytic oracles
Outcome disk_oracles()
{
    auto d = ConvexDomain::disk({0, 0}, 1.0);
    CounterRng rng(303);
    double worst_fc = 0;
    for (int i = 0; i < 100000; ++i)
    {
        Vec x = d.sample_interior(rng);
        Vec v = rng.unit_vector(2) * (0.5 + rng.uniform());
        long double xv = (long double)x[0] * v[0] + (long double)x[1] * v[1];
        long double vv = (long double)v[0] * v[0] + (long double)v[1] * v[1];
        long double xx = (long double)x[0] * x[0] + (long double)x[1] * x[1];
        long double root = (-xv + std::sqrt(xv * xv + vv * (1 - xx))) / vv;
        worst_fc = std::max(worst_fc, std::abs((double)root - d.first_contact(x, v)));
    }
    // inscribed square: unit speed from the chord midpoint
    Vec x0(0.5, 0.5), v0 = Vec(-1, 1) / std::sqrt(2.0);
    double period = 4 * std::sqrt(2.0);
    Characteristic loop = characteristic_at(d, x0, v0, period);
    double close_err = std::max(norm(loop.state.x - x0), norm(loop.state.v - v0));
    ReboundChain ch = rebound_sequence(d, x0, v0, period + 1);
    double period_err = ch.events.size() >= 5 ? std::abs(ch.events[4].t - ch.events[0].t - period) : 1;
    double worst_h = 0;
    Vec xb(std::cos(0.7), std::sin(0.7));
    for (double p : {2.0, 10.0, 1e2, 1e4})
        worst_h = std::max(worst_h, std::abs(h_p(d, xb, p) - std::sqrt(2 / p - 1 / (p * p))));
    return {worst_fc <= 1e-12 && close_err <= 1e-9 && period_err <= 1e-9 && worst_h <= 1e-6,
            fmt("first_contact %.2e, square orbit closure %.2e, period error %.2e, h_p %.2e",
                worst_fc, close_err, period_err, worst_h)};
}

// 4. transport L2 drift, refinement order and boundary identity
Outcome transport()
{
    auto disk = ConvexDomain::disk({0, 0}, 1.0);
    auto u0 = bump_field({0.2, 0.1}, 0.5, {0.3, 0}, 1.0);
    QuadratureSpec q;
    q.rv = 1.3;
    std::vector<double> drift;
    for (int n : {8, 16, 32})
    {
        q.nx = n;
        q.nv = n / 2;
        drift.push_back(l2_report(disk, u0, {0, 0.5, 1.0}, q).max_drift);
    }
    double order = std::min(std::log2(drift[0] / drift[1]), std::log2(drift[1] / drift[2]));
    q.nx = 48;
    q.nv = 24;
    double fine = l2_report(disk, u0, {0, 0.5, 1.0}, q).max_drift;

    double worst_bc = 0;
    auto g = gaussian_field({0.5, 0.2}, 0.4, {0.3, -0.2}, 0.7);
    for (const auto& dom : {disk, ConvexDomain::ellipse({0, 0}, {2, 1}),
                            ConvexDomain::superellipse({0, 0}, {1, 1}, 4)})
    {
        CounterRng rng(404, static_cast<int>(dom.shape()));
        for (int i = 0; i < 20000; ++i)
        {
            BoundarySample b = dom.sample_boundary(rng);
            Vec w = rng.unit_vector(2) * (0.2 + rng.uniform());
            if (std::abs(dot(w, b.n)) < 1e-3 * norm(w))
                continue;
            double t = 3 * rng.uniform();
            double a1 = evolve_pointwise(dom, g, t, b.x, w).value;
            double a2 = evolve_pointwise(dom, g, t, b.x, specular_reflect(w, b.n)).value;
            worst_bc = std::max(worst_bc, std::abs(a1 - a2));
        }
    }
    return {fine <= 1e-3 && order >= 1 && worst_bc <= 1e-8,
            fmt("disk drift %.2e/%.2e/%.2e at nx 8/16/32 (order %.2f), %.2e at nx 48, "
                "u(x,v) - u(x,R_x v) %.2e",
                drift[0], drift[1], drift[2], order, fine, worst_bc)};
}

// 5. spreading constant over a 27-point design
Outcome spreading(double& seconds)
{
    auto t0 = std::chrono::steady_clock::now();
    Kernel k = build_kernel(kernel_preset("hard_spheres", 3));
    VelocityGrid g{3, 3.0, 24};
    int positive = 0, se_ok = 0;
    double min_est = 1e300, max_se = 0;
    std::uint64_t stream = 0;
    for (double R : {0.5, 1.0, 1.5})
        for (double ratio : {0.5, 0.75, 1.0})
            for (double xi : {0.1, 0.25, 0.4})
            {
                double r = ratio * R;
                McSpec mc;
                mc.samples = 4000;
                mc.seed = 505;
                mc.stream = stream++;
                SpreadingResult s = spreading_constant(k, Vec{}, r, R, xi, g, mc, 0.02);
                positive += s.estimate > 0;
                se_ok += s.max_rel_se <= 0.02;
                min_est = std::min(min_est, s.estimate);
                max_se = std::max(max_se, s.max_rel_se);
            }
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {positive == 27 && se_ok == 27 && seconds <= 600,
            fmt("R in {0.5,1,1.5}, r/R in {0.5,0.75,1}, xi in {0.1,0.25,0.4}: %d/27 positive, %d/27 with rel SE <= 2%%, min estimate %.3g, max rel SE %.3g, "
                "%.1f s (limit 600 s)",
                positive, se_ok, min_est, max_se, seconds)};
}

// 6. fitted bound constants stable across N_v 32 -> 48
Outcome bound_fits()
{
    KernelParams p = kernel_preset("noncutoff", 3);
    Kernel k = build_kernel(p);
    std::vector<Vec> probes{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {1.5, 1.5, 0}};
    std::vector<BoundFit> fits;
    for (int nv : {32, 48})
    {
        VelocityGrid g{3, 4.0, nv};
        GridFunction m(g, [](const Vec& v) { return std::exp(-norm2(v) / 2) / std::pow(2 * pi, 1.5); });
        McSpec mc;
        mc.samples = 20000;
        mc.seed = 606;
        fits.push_back(fit_bound_constants(k, 0.1, m, m, probes, mc));
    }
    auto rel = [](double a, double b) { return std::abs(b - a) / std::abs(a); };
    double dl = rel(fits[0].c_loss, fits[1].c_loss);
    double ds = rel(fits[0].c_s, fits[1].c_s);
    double dq = rel(fits[0].c_q1, fits[1].c_q1);
    return {dl <= 0.2 && ds <= 0.2 && dq <= 0.2,
            fmt("c_loss %.4g -> %.4g (%.1f%%), c_s %.4g -> %.4g (%.1f%%), c_q1 %.4g -> %.4g (%.1f%%)",
                fits[0].c_loss, fits[1].c_loss, 100 * dl, fits[0].c_s, fits[1].c_s, 100 * ds,
                fits[0].c_q1, fits[1].c_q1, 100 * dq)};
}

// 7. small-angle asymptotics of the angular mass
Outcome asymptotics()
{
    std::string detail;
    bool ok = true;
    for (double nu : {0.5, 1.0, 1.5})
    {
        KernelParams p = kernel_preset("noncutoff", 3);
        p.nu = nu;
        Kernel k = build_kernel(p);
        double ratio = angular_masses(k, 1e-3).n_b_co * std::pow(1e-3, nu) / (p.b0 / nu);
        ok = ok && std::abs(ratio - 1) <= 0.05;
        detail += fmt("nu=%.1f ratio %.4f, ", nu, ratio);
    }
    KernelParams p = kernel_preset("noncutoff", 3);
    p.nu = 0;
    Kernel k = build_kernel(p);
    double ratio = angular_masses(k, 1e-4).n_b_co / (p.b0 * std::abs(std::log(1e-4)));
    ok = ok && std::abs(ratio - 1) <= 0.10;
    detail += fmt("nu=0 log ratio %.4f", ratio);
    return {ok, detail};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 8. certificate pipeline
Outcome certificate()
{
    Bounds b;
    b.E_f = 2;
    b.Eprime_f = 2;
    b.W_f = 1;
    b.M = 1;
    b.E = 1;
    b.R_X = 1;
    double worst_r2 = 1;
    std::string fits;
    struct Run
    {
        ConvexDomain dom;
        const char* kernel;
    };
    for (const Run& r : {Run{ConvexDomain::disk({0, 0}, 1), "hard_spheres"},
                         Run{ConvexDomain::ellipse({0, 0}, {2, 1}), "hard_spheres"},
                         Run{ConvexDomain::torus({2, 2}), "maxwellian_cutoff"}})
    {
        Certificate c = run_certificate(b, build_kernel(kernel_preset(r.kernel, 2)), r.dom, 1);
        worst_r2 = std::min(worst_r2, c.fit_r2);
        fits += fmt("%s %.6f ", r.dom.name().c_str(), c.fit_r2);
    }
    bool thresholds = k_threshold(0) == 2.0 && k_threshold(1) == 4.0;

    fs::path dir = fs::current_path() / "acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "c.toml") << "seed = 11\n"
                                     "domain = {shape=\"disk\", center=[0,0], radius=1}\n"
                                     "kernel = {preset=\"noncutoff\", dim=2, nu=0}\n"
                                     "[bounds]\nE_f = 2\nEprime_f = 2\nW_f = 1\nM = 1\nE = 1\nR_X = 1\n"
                                     "[certificate]\ntau = 1\n";
    std::ostringstream out, err;
    int c1 = cli::run({"certificate", (dir / "c.toml").string(), "-o", (dir / "a").string()}, out, err);
    int c2 = cli::run({"certificate", (dir / "c.toml").string(), "-o", (dir / "b").string()}, out, err);
    std::string ja = slurp(dir / "a" / "certificate.json"), jb = slurp(dir / "b" / "certificate.json");
    bool identical = c1 == 0 && c2 == 0 && !ja.empty() && ja == jb
                     && slurp(dir / "a" / "certificate_audit.csv") == slurp(dir / "b" / "certificate_audit.csv");
    bool k2 = ja.find("\"K\": 2,") != std::string::npos;
    fs::remove_all(dir);
    return {worst_r2 >= 0.999 && thresholds && k2 && identical,
            fmt("fit R2 [%s], K(0) = %g, K threshold(1) = %g, CLI K=2 %s, JSON bit-identical %s",
                fits.c_str(), k_threshold(0), k_threshold(1), k2 ? "yes" : "no",
                identical ? "yes" : "no")};
}

// 9. grazing falsification
Outcome grazing()
{
    std::uint64_t counter = 0, held = 0, trials = 0;
    GrazingOptions opt;
    std::vector<ConvexDomain> doms{ConvexDomain::disk({0, 0}, 1), ConvexDomain::ellipse({0, 0}, {2, 1}),
                                   ConvexDomain::superellipse({0, 0}, {1, 1}, 4)};
    for (const auto& dom : doms)
        for (double eps : {0.05, 0.1, 0.2})
        {
            GrazingConstants g = grazing_constants(dom, eps, 0.5, 1, 1e9, opt);
            FalsificationReport r = falsify_grazing(dom, g, 100000, 909);
            counter += r.counterexamples;
            held += r.hypothesis_held;
            trials += r.trials;
        }
    return {counter == 0 && held > 0,
            fmt("disk, ellipse, superellipse (planar) x 3 eps x 1e5 trials: %llu trials, %llu hypothesis held, %llu counterexamples",
                (unsigned long long)trials, (unsigned long long)held,
                (unsigned long long)counter)};
}

// 10. kinetic vacuum filling
Outcome vacuum_filling()
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 2));
    VelocityGrid g{2, 4.0, 16};
    auto ball = [](const Vec& v) { return norm(v - Vec(1.5, 0)) <= 1 ? 0.25 : 0.0; };
    SimOptions o;
    o.T = 0.1;
    o.dt = 0.01;
    KineticState s0;
    s0.vgrid = g;
    s0.f = GridFunction(g, ball).values();
    double before = min_over_ball(s0, Vec(0, 0), 0.4);
    Trajectory h = homogeneous_solve(k, GridFunction(g, ball), o);
    double hmin = min_over_ball(h.final_state, Vec(0, 0), 0.4);
    auto disk = ConvexDomain::disk({0, 0}, 1);
    Trajectory s = inhomogeneous_solve(disk, k, [&](const Vec&, const Vec& v) { return ball(v); }, 12, g, o);
    double smin = min_over_ball(s.final_state, Vec(0, 0), 0.4);
    return {before == 0 && hmin > 0 && smin > 0 && h.max_mass_drift <= 1e-3 && s.max_mass_drift <= 1e-3,
            fmt("min over B(0,0.4): initial %.3g, homogeneous %.3g, disk %.3g at t=0.1; "
                "mass drift %.2e / %.2e",
                before, hmin, smin, h.max_mass_drift, s.max_mass_drift)};
}

}  // namespace

int main()
{
    auto start = std::chrono::steady_clock::now();
    int failed = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try
        {
            r = fn();
        }
        catch (const std::exception& e)
        {
            r = {false, std::string("exception: ") + e.what()};
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !r.pass;
        std::printf("%s %d %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", id, name, r.detail.c_str(), s);
        std::fflush(stdout);
    };
    double t1 = 0, t5 = 0;
    report(1, "reflection and flow invariants", [&] { return reflection_flow(t1); });
    report(2, "reversibility", reversibility);
    report(3, "disk analytic oracles", disk_oracles);
    report(4, "free transport", transport);
    report(5, "spreading constant design", [&] { return spreading(t5); });
    report(6, "bound constant stability", bound_fits);
    report(7, "angular asymptotics", asymptotics);
    report(8, "certificate pipeline", certificate);
    report(9, "grazing falsification", grazing);
    double total = 0;
    report(10, "kinetic vacuum filling", [&] {
        Outcome r = vacuum_filling();
        total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.pass = r.pass && total <= 1800;
        r.detail += fmt("; suite %.0f s (limit 1800 s)", total);
        return r;
    });
    std::printf("%d of 10 criteria failed\n", failed);
    return failed ? 1 : 0;
}
