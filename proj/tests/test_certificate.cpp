// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "vf/certificate.hpp"
#include "vf/error.hpp"
#include "vf/rng.hpp"

using namespace vf;
constexpr double pi = std::numbers::pi;

namespace {

Bounds unit_bounds()
{
    Bounds b;
    b.E_f = 1;
    b.M = 1;
    b.E = 1;
    b.R_X = 1;
    b.Eprime_f = 1;
    b.W_f = 1;
    return b;
}

Errc code_of(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const Error& e)
    {
        return e.code();
    }
    return Errc::config_error;
}

// Hand-built configuration for spreading checks on the torus
UpheavalConfig manual_cfg(double R_min, double delta_V, std::vector<double> speeds)
{
    UpheavalConfig u;
    u.dim = 3;
    u.R_min = R_min;
    u.delta_V = delta_V;
    u.delta_X = 0.1;
    u.delta_T = 1;
    u.log_a0 = std::log(1e-3);
    u.C_Q = 1;
    u.C_L = 1;
    u.gamma = 0;
    u.gamma_plus = 0;
    u.v_norm = std::move(speeds);
    return u;
}

}  // namespace

TEST_CASE("upheaval mass radius")
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 2));
    auto dom = ConvexDomain::disk({0, 0}, 1);
    UpheavalConfig u = upheaval(unit_bounds(), k, dom, 0.5);
    CHECK(u.alpha == doctest::Approx(2));
    CHECK(u.R_mass == doctest::Approx(2));
    CHECK(u.log_a_init == doctest::Approx(std::log(1 / (8 * std::pow(4 * pi, 2)))));
    CHECK(u.v1_norm + u.r_n >= 2 * u.d_U / u.tau0);
    CHECK(u.v1_norm + u.steps[u.n - 1].r < 2 * u.d_U / u.tau0);
    CHECK(u.R_min == doctest::Approx(u.r_n));
    CHECK(u.delta_T == doctest::Approx(0.75));
    CHECK(u.delta_V == doctest::Approx(0.1 * u.R_min));
    CHECK(u.delta_X <= 0.1 * u.R_min);
    CHECK(!u.x_anchor.empty());
    for (double v : u.v_norm)
        CHECK(v <= u.R_min);
}

TEST_CASE("halving tau0 needs more iterations and lowers a0")
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 2));
    auto dom = ConvexDomain::disk({0, 0}, 1);
    UpheavalConfig a = upheaval(unit_bounds(), k, dom, 0.5);
    UpheavalConfig b = upheaval(unit_bounds(), k, dom, 0.25);
    CHECK(b.n > a.n);
    CHECK(b.log_a0 < a.log_a0);
}

TEST_CASE("missing bounds")
{
    Kernel soft = build_kernel(kernel_preset("soft", 3));
    Bounds b = unit_bounds();
    CHECK(code_of([&] { validate_bounds(b, soft); }) == Errc::missing_bound);
    b.Lp_f = 1;
    b.p_gamma = 2;
    CHECK_NOTHROW(validate_bounds(b, soft));
    Kernel nc = build_kernel(kernel_preset("noncutoff", 3));
    b.W_f = 0;
    CHECK(code_of([&] { validate_bounds(b, nc); }) == Errc::missing_bound);
}

TEST_CASE("alpha_1 quadrature matches the closed form")
{
    UpheavalConfig u;
    u.dim = 3;
    u.gamma = 0;
    u.gamma_plus = 0;
    u.C_Q = 1;
    u.C_L = 1;
    u.Delta = 1;
    u.v1_norm = 1;
    u.log_a_init = 0;
    // P_0 = 1 / 4^{1/2}, window Delta / (4 r_0) = 1/4, <3>^0 = 1
    for (double t : {0.05, 0.25, 1.0})
    {
        double m = std::min(t, 0.25);
        double closed = 0.5 * (1 - std::exp(-m));
        CHECK(upheaval_alpha_quadrature(u, 1, t) == doctest::Approx(closed).epsilon(1e-13));
    }
}

TEST_CASE("monomial upheaval bound lies below the nested quadrature")
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 3));
    auto dom = ConvexDomain::disk({0, 0, 0}, 1, 3);
    UpheavalConfig u = upheaval(unit_bounds(), k, dom, 0.5);
    for (int n = 1; n <= 3; ++n)
    {
        const UpheavalStep& s = u.steps[n];
        double t = std::min(u.tau0 / 2, std::exp(s.log_s_lim));
        double mono = std::exp(s.log_A + s.k * std::log(t));
        double quad = upheaval_alpha_quadrature(u, n, t, 16);
        CHECK(mono > 0);
        CHECK(mono <= quad * (1 + 1e-9));
    }
}

TEST_CASE("far spreading ratio and N1")
{
    UpheavalConfig u = manual_cfg(2, 0.1, {2.0, 1.0, 0.0});
    SpreadState s = spread_far(u, build_kernel(kernel_preset("hard_spheres", 3)), 0.5, nullptr,
                               true);
    int closed = static_cast<int>(std::ceil(std::log(60.0) / std::log(3 * std::sqrt(2.0) / 4)));
    CHECK(closed == 70);
    CHECK(s.N1 == 70);
    CHECK(s.far_rows[7].r / s.far_rows[0].r == doctest::Approx(std::pow(1.06066017, 7)).epsilon(1e-8));
    CHECK(s.far_rows[7].r / s.far_rows[0].r == doctest::Approx(1.51).epsilon(0.01));
    CHECK(s.N2 >= s.N1);
    CHECK(s.alpha < s.tau1);
    for (std::size_t i = 1; i < s.far_rows.size(); ++i)
    {
        CHECK(s.far_rows[i].r > s.far_rows[i - 1].r);
        CHECK(std::isfinite(s.far_rows[i].log_a));
    }
    CHECK(code_of([&] {
              spread_far(u, build_kernel(kernel_preset("hard_spheres", 3)), 2, nullptr, true);
          })
          == Errc::invalid_argument);
}

TEST_CASE("grazing radii arithmetic and growth")
{
    double xi = 0.5 - 3 / (8 * std::sqrt(2.0));
    auto r = grazing_radii(1, xi, 2);
    double path1 = std::sqrt(2.0) * (1 - xi) - 0.25;
    double path2 = std::sqrt(2.0) - std::sqrt(2.0) * 0.5 + 3.0 / 8 - 0.25;
    CHECK(r[1] == doctest::Approx(path1).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(path2).epsilon(1e-14));
    // neither the stated cap nor 1/2 - 3/(8 sqrt2) grows from r_0 = delta_V
    CHECK(r[1] < r[0]);
    auto rc = grazing_radii(1, grazing_xi_cap(), 1);
    CHECK(rc[1] < rc[0]);
    CounterRng rng(3, 0);
    for (int i = 0; i < 100; ++i)
    {
        double dv = 0.01 + 10 * rng.uniform();
        double x = grazing_xi(dv);
        CHECK(x <= grazing_xi_cap());
        auto rr = grazing_radii(dv, x, 200);
        for (std::size_t j = 1; j < rr.size(); ++j)
            CHECK(rr[j] > rr[j - 1]);
    }
}

TEST_CASE("grazing spreading on a bounded domain")
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 3));
    UpheavalConfig u = manual_cfg(2, 0.1, {0.0, 0.05, 1.0, 2.0});
    GrazingConstants gc;
    gc.eps = u.delta_V / 4;
    gc.p_eps = 10;
    gc.alpha_x = 0.05;
    CHECK(code_of([&] { spread_far(u, k, 0.01, nullptr, false); })
          == Errc::grazing_constants_missing);
    double DT = delta_T_of(u, &gc, false);
    CHECK(DT == doctest::Approx(std::min(1.0, std::max(0.05 / 6, 0.1 / 6))));
    SpreadState far = spread_far(u, k, DT / 2, &gc, false);
    SpreadState g = spread_grazing(u, k, far, &gc, false);
    // anchors below delta_V have N_max = 0 and do not enter v_m
    CHECK(g.N_max[0] == 0);
    CHECK(g.N_max[1] == 0);
    CHECK(g.N_max[2] > 0);
    double xi = grazing_xi(0.1);
    double vm = 1e300;
    for (double v : {1.0, 2.0})
    {
        auto r = grazing_radii(0.1, xi, 400);
        std::size_t n = 0;
        while (!(r[n] > v))
            ++n;
        vm = std::min(vm, v - r[n - 1]);
    }
    CHECK(g.v_m == doctest::Approx(vm));
    CHECK(g.r_V > 0);
    CHECK(g.log_b <= 2 * far.log_a_far + 1e-9);

    SpreadState m = merge_centered_ball(g, g.Delta_T, u.C_L, u.gamma_plus);
    CHECK(m.damping == 1);
    CHECK(m.log_a <= far.log_a_far);
    CHECK(m.log_a <= g.log_b);
    SpreadState later = merge_centered_ball(g, 2 * g.Delta_T, u.C_L, u.gamma_plus);
    CHECK(later.r_V == m.r_V);
    CHECK(later.damping < 1);
    CHECK(later.log_a <= m.log_a);
    CHECK(std::log(later.damping) == doctest::Approx(-g.Delta_T * u.C_L));
}

TEST_CASE("Maxwellian stage")
{
    // r_n^2 2^{-n} converges with the default schedule
    Certificate c = maxwellian_certificate(1, std::log(0.5), 3, 0, {}, {}, 64);
    // prod_{m=2}^{N+1} (1 - 1/m^2) = (N+2) / (2 (N+1)) telescopes to 1/2
    const auto& last = c.audit.back();
    double q = last.r * last.r * std::pow(2.0, -last.n);
    double prod = (last.n + 2.0) / (2.0 * (last.n + 1.0));
    CHECK(q == doctest::Approx(prod * prod).epsilon(1e-10));
    CHECK(q == doctest::Approx(0.25).epsilon(0.04));
    CHECK(c.fit_r2 >= 0.999);
    for (double a0 : {1e-3, 0.1, 0.5, 0.9})
    {
        Certificate ci = maxwellian_certificate(0.7, std::log(a0), 3, 1, {}, {}, 64);
        CHECK(ci.theta > 0);
        CHECK(ci.fit_r2 >= 0.999);
        // the Maxwellian envelope lies below every shell value
        for (std::size_t n = 0; n + 1 < ci.audit.size(); ++n)
            CHECK(ci.log_rho_prime - ci.audit[n].r * ci.audit[n].r / (2 * ci.theta)
                  <= ci.audit[n + 1].log_a + 1e-9 * std::abs(ci.audit[n + 1].log_a));
    }
    Certificate a = maxwellian_certificate(0.7, std::log(1e-3), 3, 1, {}, {}, 64);
    Certificate b = maxwellian_certificate(0.7, std::log(2e-3), 3, 1, {}, {}, 64);
    CHECK(b.theta == doctest::Approx(a.theta).epsilon(0.01));
    CHECK(b.log_rho_prime > a.log_rho_prime);
    CHECK(code_of([&] { maxwellian_certificate(1, 0, 3, 0, {}, std::vector<double>(64, 0.9), 64); })
          == Errc::fit_rejected);
}

TEST_CASE("exponent K")
{
    CHECK(k_threshold(0) == 2.0);
    CHECK(k_threshold(1) == 4.0);
    CHECK(k_threshold(1.5) > 4);
    Kernel k = build_kernel(kernel_preset("noncutoff", 3));
    Bounds b = unit_bounds();
    KernelParams p = kernel_preset("noncutoff", 3);
    p.nu = 0;
    Certificate c0 = noncutoff_certificate(1, std::log(0.9), build_kernel(p), b, {}, {}, {}, 32);
    CHECK(c0.K == 2.0);
    CHECK(c0.C2 > 0);
    // C1 exp(-C2 r_n^K) lies below the shell value a_{n+1} and below a_0
    std::vector<AuditRow> rows;
    for (const auto& row : c0.audit)
        if (row.stage == "noncutoff")
            rows.push_back(row);
    CHECK(c0.log_C1 <= std::log(0.9));
    for (std::size_t n = 0; n + 1 < rows.size(); ++n)
        CHECK(c0.log_C1 - c0.C2 * std::pow(rows[n].r, c0.K) <= rows[n + 1].log_a);
    Certificate mx = maxwellian_certificate(1, std::log(0.5), 3, 0, {}, {}, 64);
    CHECK(mx.K == c0.K);
}

TEST_CASE("eps_n satisfies the small-angle inequality")
{
    Kernel k = build_kernel(kernel_preset("noncutoff", 3));
    Bounds b = unit_bounds();
    CertConstants c;
    double C_f = constant_Cf(k, b, c);
    for (double a : {0.05, 0.2})
        for (double r : {0.5, 1.0})
        {
            double xi = 0.25, R = std::sqrt(2.0) * r;
            double eps = choose_eps_n(k, std::log(a), r, xi, R, C_f, c);
            REQUIRE(eps < pi / 4);
            double lhs = C_f * angular_masses(k, eps).m_b_nco * std::pow(jbracket(R), 2);
            double rhs = 0.5 * a * a * constant_CQ(k, c) * std::pow(r, 3) * std::pow(xi, 0.5);
            CHECK(lhs / rhs == doctest::Approx(1).epsilon(0.1));
        }
}

TEST_CASE("Delta schedule")
{
    DeltaSchedule d;
    CHECK_NOTHROW(d.validate());
    CHECK(d.tail_from(0) == doctest::Approx(1).epsilon(1e-12));
    CHECK(d.tail_from(3) + d.at(0) + d.at(1) + d.at(2) == doctest::Approx(1).epsilon(1e-12));
    DeltaSchedule bad{{0.5, 0.4}};
    CHECK(code_of([&] { bad.validate(); }) == Errc::schedule_invalid);
    Kernel k = build_kernel(kernel_preset("noncutoff", 3));
    CHECK(code_of([&] { noncutoff_certificate(1, -1, k, unit_bounds(), {}, bad, {}, 16); })
          == Errc::schedule_invalid);
    DeltaSchedule ok{{0.5, 0.25, 0.25}};
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("pipeline determinism and sensitivity")
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 2));
    auto dom = ConvexDomain::disk({0, 0}, 1);
    Bounds b = unit_bounds();
    CertificateOptions opt;
    opt.grazing.boundary_samples = 1024;
    Certificate c1 = run_certificate(b, k, dom, 1, opt);
    Certificate c2 = run_certificate(b, k, dom, 1, opt);
    REQUIRE(c1.audit.size() == c2.audit.size());
    for (std::size_t i = 0; i < c1.audit.size(); ++i)
    {
        CHECK(c1.audit[i].stage == c2.audit[i].stage);
        CHECK(std::memcmp(&c1.audit[i].log_a, &c2.audit[i].log_a, sizeof(double)) == 0);
        CHECK(std::memcmp(&c1.audit[i].r, &c2.audit[i].r, sizeof(double)) == 0);
    }
    CHECK(c1.fit_r2 >= 0.999);
    CHECK(c1.theta > 0);
    CHECK(c1.r_V > 0);
    CHECK(c1.defaulted.size() == 5);

    // larger E_f lowers the ball amplitude and rho; theta moves by about 1.4% per decade
    double prev_rho = c1.log_rho, prev_a = c1.log_a_ball;
    for (double Ef : {3.0, 10.0})
    {
        b.E_f = Ef;
        Certificate c = run_certificate(b, k, dom, 1, opt);
        CHECK(c.log_a_ball < prev_a);
        CHECK(c.log_rho < prev_rho);
        CHECK(c.theta == doctest::Approx(c1.theta).epsilon(0.03));
        prev_rho = c.log_rho;
        prev_a = c.log_a_ball;
    }
}

TEST_CASE("torus pipeline skips grazing")
{
    Kernel k = build_kernel(kernel_preset("maxwellian_cutoff", 2));
    auto dom = ConvexDomain::torus({2, 2}, 2);
    Certificate c = run_certificate(unit_bounds(), k, dom, 1);
    CHECK(c.kind == CertKind::maxwellian);
    CHECK(c.theta > 0);
    CHECK(c.fit_r2 >= 0.999);
}
