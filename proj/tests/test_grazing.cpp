// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vf/error.hpp"
#include "vf/grazing.hpp"

using namespace vf;
constexpr double pi = std::numbers::pi;

namespace {

double disk_h(double p) { return std::sqrt(2 / p - 1 / (p * p)); }

}  // namespace

TEST_CASE("disk h_p matches the inner-circle tangency formula")
{
    auto dom = ConvexDomain::disk({0, 0}, 1);
    Vec x(std::cos(0.3), std::sin(0.3));
    CHECK(h_p(dom, x, 2) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-9));
    CHECK(h_p(dom, x, 10) == doctest::Approx(disk_h(10)).epsilon(1e-8));
    CHECK(std::abs(h_p(dom, x, 1e4) - 0.0141418) < 1e-5);
    CHECK(h_p(dom, x, 1) == 1);
}

TEST_CASE("h_p off the boundary")
{
    auto dom = ConvexDomain::disk({0, 0}, 1);
    try
    {
        h_p(dom, Vec(0.5, 0), 3);
        CHECK(false);
    }
    catch (const Error& e)
    {
        CHECK(e.code() == Errc::not_on_boundary);
    }
}

TEST_CASE("disk h_p is rotation invariant and decreasing in p")
{
    auto dom = ConvexDomain::disk({0.2, -0.1}, 1);
    GrazingOptions opt;
    opt.boundary_samples = 64;
    auto rows = h_p_table(dom, {2, 4, 16, 100, 1e4}, opt);
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        CHECK(rows[i].sup_h == doctest::Approx(disk_h(rows[i].p)).epsilon(1e-7));
        if (i)
            CHECK(rows[i].sup_h < rows[i - 1].sup_h);
    }
    auto samples = grazing_boundary_samples(dom, opt);
    double lo = 1, hi = 0;
    for (const auto& b : samples)
    {
        double h = h_p(dom, b.x, 7);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    CHECK(hi - lo <= 1e-9);
}

TEST_CASE("ball h_p in three dimensions")
{
    auto dom = ConvexDomain::disk({0, 0, 0}, 1, 3);
    Vec x = normalized(Vec(1, 2, 2));
    CHECK(h_p(dom, x, 5, 8) == doctest::Approx(disk_h(5)).epsilon(1e-7));
}

TEST_CASE("disk p threshold inverts the analytic h_p")
{
    auto dom = ConvexDomain::disk({0, 0}, 1);
    GrazingOptions opt;
    opt.boundary_samples = 1024;
    CHECK(p_threshold(dom, 0.1, opt) == 200);
    GrazingConstants g = grazing_constants(dom, 0.2, 0.5, 1, 0.01, opt);
    CHECK(g.p_eps == 200);
    CHECK(g.l_eps <= 1.0 / g.p_eps);
    CHECK(h_p(dom, Vec(1, 0), g.p_eps) <= 0.1);
    CHECK(h_p(dom, Vec(1, 0), g.p_eps - 1) > 0.1);
}

TEST_CASE("alpha_X for the disk")
{
    auto dom = ConvexDomain::disk({0, 0}, 1);
    GrazingOptions opt;
    opt.boundary_samples = 4096;
    double eps = 0.2;
    // 2 sin(angle) = eps/2 with chord length 2 sin(angle/2)
    double ang = std::asin(eps / 4);
    double chord = 2 * std::sin(ang / 2);
    double a = alpha_x(dom, eps, opt);
    CHECK(a <= chord + 2 * pi / 4096);
    CHECK(a >= chord - 1e-12);
    opt.boundary_samples = 64;
    CHECK_THROWS_AS(alpha_x(dom, eps, opt), Error);
}

TEST_CASE("l_eps and t_eps monotonicity")
{
    auto dom = ConvexDomain::ellipse({0, 0}, {2, 1});
    GrazingOptions opt;
    opt.boundary_samples = 1024;
    GrazingConstants g = grazing_constants(dom, 0.2, 0.5, 1, 0.01, opt);
    double prev = 0;
    for (double tau = 1e-4; tau < 1; tau *= 2)
    {
        double l = g.l_at(g.v_m, tau);
        CHECK(l >= prev);
        CHECK(l <= 1.0 / g.p_eps);
        prev = l;
    }
    CHECK(g.t_at(2) < g.t_at(1));
    CHECK_THROWS(grazing_constants(dom, 0.2, 1, 0.5, 0.01, opt));
}

TEST_CASE("ellipse sup h_p sits near the sharp ends")
{
    auto dom = ConvexDomain::ellipse({0, 0}, {2, 1});
    GrazingOptions opt;
    opt.boundary_samples = 1024;
    SupHp s = sup_h_p(dom, 20, opt);
    CHECK(s.refined >= s.scan);
    // maximal curvature end, as the osculating-circle value sqrt(2 delta / rho) predicts
    CHECK(std::abs(s.x[0]) > 1.9);
    CHECK(h_p(dom, Vec(2, 0), 20) > h_p(dom, Vec(0, 1), 20));
    // brute-force scan over a finer boundary grid
    double brute = 0;
    for (int k = 0; k < 8000; ++k)
        brute = std::max(brute, h_p(dom, dom.boundary_param(2 * pi * k / 8000).x, 20));
    CHECK(std::abs(brute - s.refined) <= 1e-6);
}

TEST_CASE("drift check basics")
{
    auto dom = ConvexDomain::disk({0, 0}, 1);
    DriftResult straight = drift_check(dom, Vec(0, 0), Vec(0.1, 0), 1, 0.01);
    CHECK(straight.drift == 0);
    CHECK(straight.rebounds == 0);
    DriftResult head_on = drift_check(dom, Vec(0, 0), Vec(1, 0), 1.5, 0.01);
    CHECK(head_on.rebounds == 1);
    CHECK(head_on.drift == doctest::Approx(2));
    CHECK(head_on.hypothesis_violated());
}

TEST_CASE("grazing implication has no counterexamples (reduced sweep)")
{
    GrazingOptions opt;
    for (auto dom : {ConvexDomain::disk({0, 0}, 1), ConvexDomain::ellipse({0, 0}, {2, 1})})
        for (double eps : {0.05, 0.1, 0.2})
        {
            GrazingConstants g = grazing_constants(dom, eps, 0.5, 1, 1e9, opt);
            FalsificationReport r = falsify_grazing(dom, g, 2000, 7);
            CHECK(r.trials == 2000);
            CHECK(r.hypothesis_held > 0);
            CHECK(r.counterexamples == 0);
        }
}
