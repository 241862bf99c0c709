// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vf/error.hpp"
#include "vf/kernel.hpp"

using namespace vf;
constexpr double pi = std::numbers::pi;

namespace {

// Independent composite Simpson on a log-spaced grid in theta
double simpson_log(const std::function<double(double)>& f, double a, double b, int n)
{
    double la = std::log(a), lb = std::log(b), h = (lb - la) / n, s = 0;
    for (int i = 0; i <= n; ++i)
    {
        double u = la + i * h, t = std::exp(u);
        double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        s += w * f(t) * t;
    }
    return s * h / 3;
}

}  // namespace

TEST_CASE("sphere areas")
{
    CHECK(sphere_area(0) == doctest::Approx(2));
    CHECK(sphere_area(1) == doctest::Approx(2 * pi));
    CHECK(sphere_area(2) == doctest::Approx(4 * pi));
}

TEST_CASE("hard spheres d=3 normalisation")
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 3));
    CHECK(k.gamma() == 1);
    CHECK(k.is_cutoff());
    CHECK(k.b(0.3) == doctest::Approx(1 / (4 * pi)));
    CHECK(k.n_b_full(AngularMeasure::sphere) == doctest::Approx(1).epsilon(1e-10));
    CHECK(k.n_b_full(AngularMeasure::polar) == doctest::Approx(1 / (2 * pi)).epsilon(1e-10));
    CHECK(k.phi(2.5) == doctest::Approx(2.5));
}

TEST_CASE("hard spheres d=2 normalisation")
{
    Kernel k = build_kernel(kernel_preset("hard_spheres", 2));
    CHECK(k.n_b_full(AngularMeasure::sphere) == doctest::Approx(1).epsilon(1e-10));
}

TEST_CASE("exponent validation")
{
    KernelParams p = kernel_preset("hard_spheres", 3);
    p.gamma = 1.5;
    CHECK_THROWS_AS(build_kernel(p), Error);
    try
    {
        build_kernel(p);
    }
    catch (const Error& e)
    {
        CHECK(e.code() == Errc::invalid_exponent);
    }
    p.gamma = -3;
    CHECK_THROWS(build_kernel(p));
    p = kernel_preset("noncutoff", 3);
    p.nu = 2;
    try
    {
        build_kernel(p);
        CHECK(false);
    }
    catch (const Error& e)
    {
        CHECK(e.code() == Errc::invalid_exponent);
    }
}

TEST_CASE("asymptote check")
{
    KernelParams p = kernel_preset("noncutoff", 3);
    p.nu = 1;
    CHECK_NOTHROW(build_kernel(p));
    p.profile = Profile::custom;
    p.b_custom = [](double t) { return 2.0 / (t * t * std::sin(t)); };  // b0 should be 2
    try
    {
        build_kernel(p);
        CHECK(false);
    }
    catch (const Error& e)
    {
        CHECK(e.code() == Errc::asymptote_mismatch);
    }
    p.b0 = 2;
    CHECK_NOTHROW(build_kernel(p));
}

TEST_CASE("phi sandwich")
{
    KernelParams p = kernel_preset("soft", 3);
    p.phi_kind = PhiKind::mollified;
    Kernel k = build_kernel(p);
    CHECK(k.phi(0.1) == doctest::Approx(1));
    CHECK(k.phi(4) == doctest::Approx(0.25));
    p.phi_scale = 2;
    CHECK_THROWS(build_kernel(p));
    p.C_phi = 3;
    CHECK_NOTHROW(build_kernel(p));
}

TEST_CASE("eps asymptotics nu=1")
{
    Kernel k = build_kernel(kernel_preset("noncutoff", 3));
    AngularMasses m = angular_masses(k, 1e-3);
    CHECK(m.n_b_co == doctest::Approx(1000).epsilon(0.05));
    CHECK(m.m_b_nco * std::pow(1e-3, 1 - 2) == doctest::Approx(1.0).epsilon(0.05));
    // independent oracle on the truncated profile
    auto f = [&](double t) { return k.b(t) * std::sin(t); };
    double oracle = simpson_log(f, 1e-3, pi / 2, 4000);
    oracle += simpson_log(f, pi / 2, pi - 1e-9, 2000);
    CHECK(m.n_b_co == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("eps asymptotics nu in (0,2)")
{
    for (double nu : {0.8, 1.5, 1.9})
    {
        KernelParams p = kernel_preset("noncutoff", 3);
        p.nu = nu;
        p.b0 = 0.7;
        Kernel k = build_kernel(p);
        AngularMasses m = angular_masses(k, 1e-3);
        CHECK(m.n_b_co * std::pow(1e-3, nu) == doctest::Approx(p.b0 / nu).epsilon(0.05));
        CHECK(m.m_b_nco * std::pow(1e-3, nu - 2) == doctest::Approx(p.b0 / (2 - nu)).epsilon(0.05));
    }
}

TEST_CASE("small nu: exact finite-eps value")
{
    // b sin = b0 theta^{-1-nu} on (0, pi/2], so the head integral is closed form
    double nu = 0.3, eps = 1e-3;
    KernelParams p = kernel_preset("noncutoff", 3);
    p.nu = nu;
    Kernel k = build_kernel(p);
    double head = (std::pow(eps, -nu) - std::pow(pi / 2, -nu)) / nu;
    double tail = simpson_log([&](double t) { return k.b(t) * std::sin(t); }, pi / 2, pi - 1e-9, 4000);
    CHECK(angular_masses(k, eps).n_b_co == doctest::Approx(head + tail).epsilon(1e-6));
    CHECK(angular_masses(k, eps).m_b_nco
          == doctest::Approx(std::pow(eps, 2 - nu) / (2 - nu)).epsilon(1e-6));
}

TEST_CASE("eps asymptotics nu=0")
{
    KernelParams p = kernel_preset("noncutoff", 3);
    p.nu = 0;
    Kernel k = build_kernel(p);
    AngularMasses m = angular_masses(k, 1e-4);
    CHECK(m.n_b_co / std::abs(std::log(1e-4)) == doctest::Approx(1).epsilon(0.10));
}

TEST_CASE("cutoff sliver and split consistency")
{
    for (int d : {2, 3})
    {
        Kernel k = build_kernel(kernel_preset("hard_spheres", d));
        double full = k.n_b_full(AngularMeasure::polar);
        double prev_n = 1e300, prev_m = 0;
        for (double eps : {1e-4, 1e-3, 1e-2, 0.1, 0.5})
        {
            AngularMasses m = angular_masses(k, eps);
            CHECK(m.n_b_co + k.small_angle_mass(eps, AngularMeasure::polar)
                  == doctest::Approx(full).epsilon(1e-10));
            CHECK(m.n_b_co < prev_n);
            CHECK(m.m_b_nco > prev_m);
            prev_n = m.n_b_co;
            prev_m = m.m_b_nco;
        }
        CHECK(angular_masses(k, 1e-4).m_b_nco < 1e-8);
    }
}

TEST_CASE("monotonicity non-cutoff")
{
    Kernel k = build_kernel(kernel_preset("noncutoff", 3));
    double prev_n = 1e300, prev_m = 0;
    for (double eps : {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.7})
    {
        AngularMasses m = angular_masses(k, eps);
        CHECK(m.n_b_co < prev_n);
        CHECK(m.m_b_nco > prev_m);
        CHECK(m.l_b > 0);
        prev_n = m.n_b_co;
        prev_m = m.m_b_nco;
    }
    CHECK_THROWS(angular_masses(k, 0.8));
    CHECK_THROWS(k.n_b_full(AngularMeasure::polar));
}

TEST_CASE("lower constant")
{
    Kernel hs = build_kernel(kernel_preset("hard_spheres", 3));
    CHECK(lower_constant(hs) == doctest::Approx(1 / (4 * pi)));
    Kernel nc = build_kernel(kernel_preset("noncutoff", 3));
    // profile minimum is at 3 pi/4: b(pi/2) cos^2(pi/4)
    double bmid = 1 / ((pi / 2) * (pi / 2));
    CHECK(lower_constant(nc) == doctest::Approx(0.5 * bmid).epsilon(1e-6));
    CHECK(angular_masses(nc, 0.1, AngularMeasure::sphere).n_b_co
          == doctest::Approx(2 * pi * angular_masses(nc, 0.1).n_b_co));
}
