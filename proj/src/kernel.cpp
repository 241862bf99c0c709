// SPDX-License-Identifier: Apache-2.0
#include "vf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vf/error.hpp"
#include "vf/quadrature.hpp"

namespace vf {

namespace {

constexpr double pi = std::numbers::pi;

// Integrate f over [a, b] with geometric panels accumulating towards a.
// Panel edges a + (b - a) 2^{-k}, stopping once the panel is below a*1e-3
// or when a = 0 at 2^{-levels}.
double geometric_integral(const std::function<double(double)>& f, double a, double b,
                          int n, int levels)
{
    double sum = 0;
    double hi = b;
    for (int k = 0; k < levels; ++k)
    {
        double lo = a + (hi - a) * 0.5;
        if (hi - a <= std::max(a * 1e-3, 0.0) || k == levels - 1)
            lo = a;
        Rule r = gauss_legendre(n, lo, hi);
        for (std::size_t i = 0; i < r.x.size(); ++i)
            sum += r.w[i] * f(r.x[i]);
        if (lo == a)
            break;
        hi = lo;
    }
    return sum;
}

// int_a^b f on [a, pi/2] and [pi/2, b] pieces with refinement comparison
double refined(const std::function<double(double)>& f, double a, double b, bool zero_left,
               double* tail_hi)
{
    auto run = [&](int n) {
        double s = 0;
        double mid = std::min(b, pi / 2);
        if (zero_left)
        {
            // Panels down to 2^-60 of b; the analytic tail below is added by the caller
            double lo = b * std::ldexp(1.0, -60);
            s += geometric_integral(f, lo, b, n, 80);
            if (tail_hi)
                *tail_hi = lo;
            return s;
        }
        if (a < mid)
            s += geometric_integral(f, a, mid, n, 200);
        if (b > mid)
        {
            Rule r = gauss_legendre(n, mid, b);
            for (std::size_t i = 0; i < r.x.size(); ++i)
                s += r.w[i] * f(r.x[i]);
        }
        return s;
    };
    double coarse = run(16);
    double fine = run(32);
    VF_REQUIRE(std::isfinite(fine), quadrature_too_coarse, "non-finite angular integral");
    VF_REQUIRE(std::abs(fine - coarse) <= 1e-8 * std::abs(fine) + 1e-300, quadrature_too_coarse,
               "angular quadrature refinement gap " + std::to_string(std::abs(fine - coarse)));
    return fine;
}

}  // namespace

double sphere_area(int k)
{
    VF_REQUIRE(k >= 0, invalid_argument, "sphere dimension must be nonnegative");
    double n = k + 1;
    return 2 * std::pow(pi, n / 2) / std::tgamma(n / 2);
}

double Kernel::phi(double z) const
{
    z = std::abs(z);
    if (p_.phi_kind == PhiKind::mollified)
        z = std::max(z, 1.0);
    if (p_.gamma == 0)
        return p_.phi_scale;
    if (p_.gamma == 1)
        return p_.phi_scale * z;
    return p_.phi_scale * std::pow(z, p_.gamma);
}

double Kernel::b(double theta) const
{
    switch (p_.profile)
    {
    case Profile::constant:
        return p_.b0;
    case Profile::custom:
        return p_.b_custom(theta);
    case Profile::power:
    default:
    {
        auto core = [&](double t) {
            double s = p_.dim == 3 ? std::sin(t) : 1.0;
            return p_.b0 * std::pow(t, -(1 + p_.nu)) / s;
        };
        if (theta <= pi / 2)
            return core(theta);
        double c = std::cos(theta - pi / 2);
        return core(pi / 2) * c * c;
    }
    }
}

double Kernel::asymptote_error(double theta) const
{
    double s = std::pow(std::sin(theta), p_.dim - 2);
    return std::abs(b(theta) * s * std::pow(theta, 1 + p_.nu) / p_.b0 - 1);
}

double Kernel::n_b_full(AngularMeasure m) const
{
    VF_REQUIRE(is_cutoff(), not_non_cutoff, "full angular mass is infinite for nu >= 0");
    return small_angle_mass(pi, m);
}

double Kernel::small_angle_mass(double eps, AngularMeasure m) const
{
    VF_REQUIRE(is_cutoff(), not_non_cutoff, "small-angle mass is infinite for nu >= 0");
    auto f = [&](double t) { return b(t) * std::pow(std::sin(t), p_.dim - 2); };
    double top = std::min(eps, pi / 2);
    double lo = 0;
    double s = refined(f, 0, top, true, &lo);
    s += p_.b0 * std::pow(lo, -p_.nu) / (-p_.nu);
    if (eps > pi / 2)
        s += refined(f, pi / 2, eps, false, nullptr);
    return s * measure_factor(m);
}

Kernel build_kernel(const KernelParams& p)
{
    VF_REQUIRE(p.dim == 2 || p.dim == 3, invalid_argument, "dimension must be 2 or 3");
    VF_REQUIRE(p.gamma > -p.dim && p.gamma <= 1, invalid_exponent,
               "gamma must lie in (-d, 1]");
    VF_REQUIRE(p.nu < 2, invalid_exponent, "nu must be below 2");
    VF_REQUIRE(p.b0 > 0, invalid_argument, "b0 must be positive");
    VF_REQUIRE(p.c_phi > 0 && p.c_phi <= p.C_phi, invalid_argument,
               "need 0 < c_phi <= C_phi");
    VF_REQUIRE(p.profile != Profile::custom || p.b_custom, invalid_argument,
               "custom profile needs a function");
    Kernel k;
    k.p_ = p;
    for (int e = -6; e <= 6; ++e)
    {
        double z = std::pow(10.0, e / 2.0);
        double ref = (p.phi_kind == PhiKind::mollified && z < 1) ? 1 : std::pow(z, p.gamma);
        double v = k.phi(z);
        VF_REQUIRE(v >= p.c_phi * ref * (1 - 1e-12) && v <= p.C_phi * ref * (1 + 1e-12),
                   invalid_argument, "Phi violates the c_phi/C_phi sandwich");
    }
    for (int e = 3; e <= 6; ++e)
    {
        double err = k.asymptote_error(std::pow(10.0, -e));
        VF_REQUIRE(err <= 0.01, asymptote_mismatch,
                   "b sin^{d-2} theta^{1+nu} deviates from b0 by " + std::to_string(err));
    }
    for (int i = 0; i <= 64; ++i)
    {
        double t = pi / 4 + i * (pi / 2) / 64;
        VF_REQUIRE(k.b(t) > 0 && std::isfinite(k.b(t)), asymptote_mismatch,
                   "b must be positive near pi/2");
    }
    return k;
}

KernelParams kernel_preset(const std::string& name, int dim)
{
    KernelParams p;
    p.name = name;
    p.dim = dim;
    if (name == "hard_spheres" || name == "maxwellian_cutoff" || name == "soft")
    {
        p.gamma = name == "hard_spheres" ? 1.0 : name == "soft" ? -1.0 : 0.0;
        p.profile = Profile::constant;
        p.b0 = 1 / sphere_area(dim - 1);
        p.nu = -(dim - 1);
        return p;
    }
    if (name == "noncutoff")
    {
        p.gamma = 0;
        p.nu = 1;
        p.b0 = 1;
        p.profile = Profile::power;
        return p;
    }
    throw Error(Errc::config_error, "unknown kernel preset '" + name + "'");
}

double lower_constant(const Kernel& k)
{
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1024; ++i)
        m = std::min(m, k.b(pi / 4 + i * (pi / 2) / 1024));
    return m;
}

AngularMasses angular_masses(const Kernel& k, double eps, AngularMeasure m)
{
    VF_REQUIRE(eps > 0 && eps < pi / 4, invalid_argument, "eps must lie in (0, pi/4)");
    int d = k.dim();
    auto f = [&](double t) { return k.b(t) * std::pow(std::sin(t), d - 2); };
    auto g = [&](double t) { return f(t) * t * t; };
    AngularMasses out;
    out.eps = eps;
    out.measure = m;
    out.n_b_co = refined(f, eps, pi, false, nullptr) * k.measure_factor(m);
    double lo = 0;
    double mass = refined(g, 0, eps, true, &lo);
    mass += k.b0() * std::pow(lo, 2 - k.nu()) / (2 - k.nu());
    out.m_b_nco = mass * k.measure_factor(m);
    out.l_b = lower_constant(k);
    return out;
}

}  // namespace vf
