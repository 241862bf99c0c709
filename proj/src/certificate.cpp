// SPDX-License-Identifier: Apache-2.0
#include "vf/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vf/error.hpp"
#include "vf/quadrature.hpp"

namespace vf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();
const double ratio_far = 3 * std::sqrt(2.0) / 4;
const double log2v = std::log(2.0);

double log_ball_volume(int d, double r)
{
    return (d / 2.0) * std::log(pi) - std::lgamma(d / 2.0 + 1) + d * std::log(r);
}

double gplus(const Kernel& k) { return std::max(k.gamma(), 0.0); }

// log of <x>^{g}
double log_jb(double x, double g) { return g == 0 ? 0 : g * std::log(jbracket(x)); }

struct LinFit
{
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

LinFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1;
    return f;
}

std::vector<double> xi_schedule(const std::vector<double>& xi, int n_iter)
{
    std::vector<double> out(n_iter);
    for (int n = 0; n < n_iter; ++n)
    {
        double v = n < static_cast<int>(xi.size()) ? xi[n] : 1.0 / ((n + 2.0) * (n + 2.0));
        VF_REQUIRE(v > 0 && v < 1, invalid_argument, "xi_n must lie in (0, 1)");
        out[n] = v;
    }
    return out;
}

struct AnchorInfo
{
    std::vector<double> speeds;  // distinct |v_i|
    std::vector<double> xi;
    std::vector<int> n_max;
    std::vector<double> radius;  // r_{N_max}
    double v_m = 0;
};

AnchorInfo analyse_anchors(const UpheavalConfig& cfg, int max_iter)
{
    AnchorInfo a;
    a.speeds = cfg.v_norm;
    std::sort(a.speeds.begin(), a.speeds.end());
    a.speeds.erase(std::unique(a.speeds.begin(), a.speeds.end()), a.speeds.end());
    double xi = grazing_xi(cfg.delta_V);
    a.v_m = inf;
    for (double s : a.speeds)
    {
        double r = cfg.delta_V, prev = r;
        int n = 0;
        while (!(r > s))
        {
            VF_REQUIRE(n < max_iter, non_convergence, "grazing radii do not reach the anchor");
            prev = r;
            r = std::sqrt(2.0) * (1 - xi) * r - cfg.delta_V / 4;
            ++n;
        }
        a.xi.push_back(xi);
        a.n_max.push_back(n);
        a.radius.push_back(r);
        if (n > 0 && s - prev > 0)
            a.v_m = std::min(a.v_m, s - prev);
    }
    if (!std::isfinite(a.v_m))
        a.v_m = cfg.delta_V;
    return a;
}

void tau_dependent(const UpheavalConfig& cfg, const GrazingConstants* gc, bool torus,
                   double v_m, SpreadState& s)
{
    s.R = std::max(3 * cfg.R_min, 2 * cfg.delta_X / s.tau + 1);
    s.tau1 = s.tau - 2 * cfg.delta_X / s.R;
    s.tau2 = cfg.delta_X / s.R;
    s.v_m = v_m;
    s.l = torus ? cfg.delta_X : std::min(cfg.delta_X, gc->l_at(v_m, s.tau2));
}

void check_gc(const UpheavalConfig& cfg, const GrazingConstants* gc, bool torus)
{
    if (torus)
        return;
    VF_REQUIRE(gc != nullptr, grazing_constants_missing,
               "bounded domains need grazing constants at eps = delta_V / 4");
    VF_REQUIRE(std::abs(gc->eps - cfg.delta_V / 4) <= 1e-9 * cfg.delta_V, invalid_argument,
               "grazing constants were computed for a different eps");
}

}  // namespace

void validate_bounds(const Bounds& b, const Kernel& k)
{
    auto need = [](bool ok, const char* what) {
        VF_REQUIRE(ok, missing_bound, std::string("missing or non-positive bound: ") + what);
    };
    need(b.E_f > 0 && std::isfinite(b.E_f), "E_f");
    need(b.M > 0 && std::isfinite(b.M), "M");
    need(b.E > 0 && std::isfinite(b.E), "E");
    need(b.R_X > 0 && std::isfinite(b.R_X), "R_X");
    if (k.gamma() < 0)
    {
        need(b.Lp_f > 0 && std::isfinite(b.Lp_f), "Lp_f");
        need(b.p_gamma > k.dim() / (k.dim() + k.gamma()), "p_gamma > d/(d+gamma)");
    }
    if (!k.is_cutoff())
    {
        need(b.W_f > 0 && std::isfinite(b.W_f), "W_f");
        need(b.Eprime_f > 0 && std::isfinite(b.Eprime_f), "Eprime_f");
    }
}

double constant_CQ(const Kernel& k, const CertConstants& c)
{
    return c.cst_Q * lower_constant(k) * k.params().c_phi;
}

double constant_CL(const Kernel& k, const Bounds& b, const CertConstants& c)
{
    double nb = k.is_cutoff() ? k.n_b_full(AngularMeasure::polar)
                              : [&] {
                                    AngularMasses m = angular_masses(k, c.eps0);
                                    return m.n_b_co + m.m_b_nco;
                                }();
    double e = b.E_f + (k.gamma() < 0 ? b.Lp_f : 0);
    return c.cst_L * nb * k.params().C_phi * e;
}

double constant_Cf(const Kernel& k, const Bounds& b, const CertConstants& c)
{
    double e = b.E_f + b.Eprime_f * b.W_f + (k.gamma() < 0 ? b.Lp_f : 0);
    return c.cst_L * k.params().C_phi * e;
}

UpheavalConfig upheaval(const Bounds& b, const Kernel& k, const ConvexDomain& dom, double tau0,
                        const CertConstants& c, const UpheavalOptions& opt)
{
    VF_REQUIRE(tau0 > 0 && std::isfinite(tau0), invalid_argument, "tau0 must be positive");
    validate_bounds(b, k);
    VF_REQUIRE(dom.dim() == k.dim(), invalid_argument, "domain and kernel dimensions differ");
    UpheavalConfig u;
    int d = k.dim();
    u.dim = d;
    u.tau0 = tau0;
    u.Delta = opt.delta > 0 ? opt.delta : 2 * tau0;
    VF_REQUIRE(u.Delta >= tau0, invalid_argument, "the initial window must contain tau0");
    u.alpha = b.M * b.R_X * b.R_X + b.E;
    u.R_mass = std::sqrt(2 * u.alpha / b.M);
    u.log_a_init = std::log(b.M) - std::log(8.0) - 2 * log_ball_volume(d, u.R_mass);
    u.v1_norm = opt.v1_norm;
    u.x1 = dom.is_torus() ? dom.axes() * 0.5 : dom.center();
    if (dom.is_torus())
        for (int i = d; i < 3; ++i)
            u.x1[i] = 0;
    u.d_U = dom.diameter();
    u.C_Q = constant_CQ(k, c);
    u.C_L = constant_CL(k, b, c);
    u.gamma = k.gamma();
    u.gamma_plus = gplus(k);

    double target = 2 * u.d_U / tau0;
    double log_tmax = std::log(tau0 / 2);
    UpheavalStep st;
    st.r = u.Delta;
    st.log_A = u.log_a_init;
    st.k = 0;
    st.log_s_lim = inf;
    u.steps.push_back(st);
    while (u.v1_norm + st.r < target)
    {
        VF_REQUIRE(st.n < opt.max_iter, non_convergence, "upheaval recursion exceeds the cap");
        double r = st.r;
        double logP = std::log(u.C_Q) + (d + u.gamma) * std::log(r) - (d / 2.0 - 1) * std::log(4.0);
        double cn = u.C_L * std::exp(log_jb(2 * r + u.v1_norm, u.gamma_plus));
        double logT = std::log(u.Delta) - (st.n + 2) * log2v - std::log(r);
        UpheavalStep nx;
        nx.n = st.n + 1;
        nx.r = r * ratio_far;
        nx.log_A = logP - std::exp(log_tmax) * cn + 2 * st.log_A - std::log(2 * st.k + 1);
        nx.k = 2 * st.k + 1;
        nx.log_s_lim = std::min(st.log_s_lim, logT);
        st = nx;
        u.steps.push_back(st);
    }
    u.n = st.n;
    u.r_n = st.r;
    u.R_min = u.v1_norm + u.r_n;
    double log_t = std::min(log_tmax, st.log_s_lim);
    u.log_alpha_n = st.log_A + st.k * log_t;
    u.log_a0 = std::log(0.5) + u.log_alpha_n
               - (tau0 / 2) * u.C_L * std::exp(log_jb(target, u.gamma_plus));
    VF_REQUIRE(std::isfinite(u.log_a0), non_convergence,
               "upheaval lower bound leaves the double exponent range");

    double dtp = opt.dt_prime > 0 ? opt.dt_prime : tau0 / 2;
    u.delta_T = std::min(u.Delta, tau0 + dtp);
    u.delta_X = std::min(opt.dx_frac * u.R_min, std::ldexp(u.Delta, -u.n));
    u.delta_V = std::min(opt.dv_frac * u.R_min, u.r_n);

    // grid cover by balls of radius rho; spacing 2 rho / sqrt(d) covers every cell
    double rho = std::ldexp(u.delta_X, -u.n);
    double box = 1;
    Vec lo, hi;
    for (int i = 0; i < d; ++i)
    {
        lo[i] = dom.is_torus() ? 0 : dom.center()[i] - dom.bounding_radius();
        hi[i] = dom.is_torus() ? dom.axes()[i] : dom.center()[i] + dom.bounding_radius();
        box *= hi[i] - lo[i];
    }
    double h_req = 2 * rho / std::sqrt(double(d));
    u.log10_NX_required = std::log10(dom.volume()) - d * std::log10(h_req);
    double h_cap = std::pow(box / opt.max_anchors, 1.0 / d);
    double h = std::max(h_req, h_cap);
    u.cover_radius = h * std::sqrt(double(d)) / 2;
    std::array<int, 3> cnt{1, 1, 1};
    for (int i = 0; i < d; ++i)
        cnt[i] = std::max(1, static_cast<int>(std::ceil((hi[i] - lo[i]) / h)));
    for (int i0 = 0; i0 < cnt[0]; ++i0)
        for (int i1 = 0; i1 < cnt[1]; ++i1)
            for (int i2 = 0; i2 < cnt[2]; ++i2)
            {
                std::array<int, 3> id{i0, i1, i2};
                Vec x;
                for (int i = 0; i < d; ++i)
                    x[i] = lo[i] + (id[i] + 0.5) * h;
                if (!dom.is_torus() && dom.signed_distance(x) > u.cover_radius)
                    continue;
                u.x_anchor.push_back(x);
                Vec dx = x - u.x1;
                if (dom.is_torus())
                    for (int i = 0; i < d; ++i)
                        dx[i] -= dom.axes()[i] * std::round(dx[i] / dom.axes()[i]);
                u.v_norm.push_back(std::min(2 * norm(dx) / tau0, u.R_min));
            }
    return u;
}

double upheaval_alpha_quadrature(const UpheavalConfig& cfg, int n, double t, int nodes)
{
    VF_REQUIRE(n >= 0 && n <= 4, invalid_argument, "quadrature audit supports n <= 4");
    if (n == 0)
        return std::exp(cfg.log_a_init);
    int m = n - 1;
    double r = cfg.Delta * std::pow(ratio_far, m);
    int d = cfg.dim;
    double P = cfg.C_Q * std::pow(r, d + cfg.gamma) / std::pow(4.0, d / 2.0 - 1);
    double c = cfg.C_L * std::exp(log_jb(2 * r + cfg.v1_norm, cfg.gamma_plus));
    double upper = std::min(t, std::ldexp(cfg.Delta, -(m + 2)) / r);
    if (upper <= 0)
        return 0;
    Rule rule = gauss_legendre(nodes, 0, upper);
    double s = 0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
    {
        double a = upheaval_alpha_quadrature(cfg, m, rule.x[i], nodes);
        s += rule.w[i] * std::exp(-rule.x[i] * c) * a * a;
    }
    return P * s;
}

double delta_T_of(const UpheavalConfig& cfg, const GrazingConstants* gc, bool torus)
{
    if (torus)
        return cfg.delta_T;
    check_gc(cfg, gc, torus);
    return std::min(cfg.delta_T, gc->t_at(3 * cfg.R_min));
}

SpreadState spread_far(const UpheavalConfig& cfg, const Kernel& k, double tau,
                       const GrazingConstants* gc, bool torus, int max_iter)
{
    check_gc(cfg, gc, torus);
    SpreadState s;
    s.mode = SpreadMode::far;
    s.Delta_T = delta_T_of(cfg, gc, torus);
    VF_REQUIRE(tau > 0 && tau <= s.Delta_T * (1 + 1e-12), invalid_argument,
               "tau must lie in (0, Delta_T]");
    s.tau = tau;
    AnchorInfo an = analyse_anchors(cfg, max_iter);
    tau_dependent(cfg, gc, torus, an.v_m, s);

    double vmax = 0;
    for (double v : cfg.v_norm)
        vmax = std::max(vmax, v);
    double need = vmax + 2 * cfg.R_min;
    double r = cfg.delta_V;
    int n = 0;
    while (r < need)
    {
        VF_REQUIRE(n < max_iter, non_convergence, "far spreading exceeds the iteration cap");
        r *= ratio_far;
        ++n;
    }
    s.N1 = n;
    int N2 = n;
    while (!(std::log(s.l) - N2 * log2v - std::log(s.R) < std::log(s.tau1)))
    {
        VF_REQUIRE(N2 < max_iter, non_convergence, "far spreading exceeds the iteration cap");
        ++N2;
    }
    s.N2 = N2;
    s.alpha = std::exp(std::log(s.l) - N2 * log2v - std::log(s.R));

    int d = k.dim();
    double damp = s.Delta_T * cfg.C_L * std::exp(log_jb(s.R, cfg.gamma_plus));
    double la = cfg.log_a0;
    double rn = cfg.delta_V;
    s.far_rows.push_back({0, rn, la});
    for (int m = 0; m < N2; ++m)
    {
        double log_l = std::log(s.l) - (N2 - m - 1) * std::log(8.0);
        la = std::log(cfg.C_Q) + (d + k.gamma()) * std::log(rn) - (d / 2.0 - 1) * std::log(4.0)
             + log_l - (m + 3) * log2v - std::log(s.R) - damp + 2 * la;
        rn *= ratio_far;
        s.far_rows.push_back({m + 1, rn, la});
    }
    VF_REQUIRE(std::isfinite(la), non_convergence, "far lower bound leaves the double range");
    s.log_a_far = la;
    s.log_a = la;
    s.r_V = 2 * cfg.R_min;
    return s;
}

std::vector<double> grazing_radii(double delta_V, double xi, int n)
{
    std::vector<double> r{delta_V};
    for (int i = 0; i < n; ++i)
        r.push_back(std::sqrt(2.0) * (1 - xi) * r.back() - delta_V / 4);
    return r;
}

double grazing_xi(double delta_V)
{
    double xi = grazing_xi_cap();
    for (int j = 0; j < 60; ++j, xi /= 2)
    {
        auto r = grazing_radii(delta_V, xi, 1);
        if (r[1] > r[0])
            return xi;
    }
    throw Error(Errc::non_convergence, "no xi makes the grazing radii grow");
}

SpreadState spread_grazing(const UpheavalConfig& cfg, const Kernel& k, const SpreadState& far,
                           const GrazingConstants* gc, bool torus, int max_iter)
{
    check_gc(cfg, gc, torus);
    SpreadState s = far;
    s.mode = SpreadMode::grazing;
    if (torus)
    {
        s.r_V = 2 * cfg.R_min;
        s.log_b = far.log_a_far;
        return s;
    }
    AnchorInfo an = analyse_anchors(cfg, max_iter);
    s.xi = an.xi;
    s.N_max = an.n_max;
    s.anchor_speed = an.speeds;
    int d = k.dim();
    double gp = cfg.gamma_plus;
    double damp_tau = s.tau * cfg.C_L * std::exp(log_jb(s.R, gp));
    double lb0 = cfg.log_a0 - (s.Delta_T - s.tau) * cfg.C_L * std::exp(log_jb(s.R, gp));
    double cap = 2 * far.log_a_far;
    s.r_V = inf;
    s.log_b = inf;
    for (std::size_t i = 0; i < an.speeds.size(); ++i)
    {
        double xi = an.xi[i];
        double r = cfg.delta_V, lb = lb0;
        std::vector<SpreadRow> rows{{0, r, lb}};
        for (int n = 0; n < an.n_max[i]; ++n)
        {
            double step = std::log(cfg.C_Q) + (d + k.gamma()) * std::log(r)
                          + (d / 2.0 - 1) * std::log(xi) + std::log(cfg.delta_X)
                          - (n + 2) * log2v - std::log(s.R) - damp_tau + 2 * lb;
            lb = std::min(step, cap);
            r = std::sqrt(2.0) * (1 - xi) * r - cfg.delta_V / 4;
            rows.push_back({n + 1, r, lb});
        }
        s.r_V = std::min(s.r_V, an.radius[i] - an.speeds[i]);
        if (lb < s.log_b)
        {
            s.log_b = lb;
            s.grazing_rows = rows;
        }
    }
    VF_REQUIRE(s.r_V > 0 && std::isfinite(s.log_b), non_convergence,
               "grazing spreading produced no centred ball");
    return s;
}

SpreadState merge_centered_ball(const SpreadState& g, double t, double C_L, double gamma_plus)
{
    SpreadState s = g;
    s.mode = SpreadMode::merged;
    double la = std::min(g.log_a_far, g.log_b);
    double log_damp = 0;
    if (t > g.Delta_T)
        log_damp = -(t - g.Delta_T) * C_L * std::exp(log_jb(g.r_V, gamma_plus));
    s.damping = std::exp(log_damp);
    s.log_a = la + log_damp;
    return s;
}

double DeltaSchedule::at(int n) const
{
    if (!values.empty())
        return n < static_cast<int>(values.size()) ? values[n] : 0;
    return 6 / (pi * pi * (n + 1.0) * (n + 1.0));
}

double DeltaSchedule::tail_from(int n) const
{
    if (!values.empty())
    {
        double s = 0;
        for (std::size_t k = std::max(n, 0); k < values.size(); ++k)
            s += values[k];
        return s;
    }
    // 6/pi^2 sum_{m >= n+1} 1/m^2 by direct summation plus an Euler-Maclaurin tail
    double s = 0;
    int M = n + 1 + 1000;
    for (int m = n + 1; m < M; ++m)
        s += 1.0 / (double(m) * m);
    s += 1.0 / M + 0.5 / (double(M) * M) + 1.0 / (6.0 * M * M * M);
    return 6 / (pi * pi) * s;
}

void DeltaSchedule::validate() const
{
    if (values.empty())
        return;
    double s = 0;
    for (double v : values)
    {
        VF_REQUIRE(v > 0 && std::isfinite(v), schedule_invalid, "Delta_n must be positive");
        s += v;
    }
    VF_REQUIRE(std::abs(s - 1) <= 1e-12, schedule_invalid,
               "Delta_n must sum to 1 (sum is " + std::to_string(s) + ")");
}

double k_threshold(double nu)
{
    VF_REQUIRE(nu >= 0 && nu < 2, invalid_exponent, "nu must lie in [0, 2)");
    return 2 * std::log(2 + 2 * nu / (2 - nu)) / std::log(2.0);
}

Certificate maxwellian_certificate(double r_V, double log_a, int dim, double gamma,
                                   const CertConstants& c, const std::vector<double>& xi_in,
                                   int n_iter)
{
    VF_REQUIRE(r_V > 0 && std::isfinite(log_a), invalid_argument, "need a centred ball");
    VF_REQUIRE(n_iter >= 8 && n_iter <= 10000, invalid_argument, "n_iter must lie in [8, 1e4]");
    auto xi = xi_schedule(xi_in, n_iter);
    Certificate cert;
    cert.kind = CertKind::maxwellian;
    cert.r_V = r_V;
    cert.log_a_ball = log_a;
    cert.K = 2;
    cert.K_threshold = 2;
    std::vector<double> rs{r_V}, las{log_a};
    double r = r_V, la = log_a;
    cert.audit.push_back({"maxwellian", 0, r, la, xi[0]});
    for (int n = 0; n < n_iter; ++n)
    {
        la = std::log(c.cst_Q * c.C_e) + 2 * la + (dim + gamma) * std::log(r)
             + (dim / 2.0 + 1) * std::log(xi[n]) - (n + 1) * log2v;
        r *= std::sqrt(2.0) * (1 - xi[n]);
        VF_REQUIRE(std::isfinite(la), non_convergence, "Maxwellian stage leaves the double range");
        rs.push_back(r);
        las.push_back(la);
        cert.audit.push_back({"maxwellian", n + 1, r, la, n + 1 < n_iter ? xi[n + 1] : 0});
    }
    // a_{n+1} holds on the shell r_n <= |v| < r_{n+1}: regress it on r_n^2
    std::vector<double> x, y;
    for (int n = n_iter / 2; n < n_iter; ++n)
    {
        x.push_back(rs[n] * rs[n]);
        y.push_back(las[n + 1]);
    }
    LinFit f = least_squares(x, y);
    cert.fit_r2 = f.r2;
    VF_REQUIRE(f.r2 >= 0.999, fit_rejected, "Maxwellian fit R^2 = " + std::to_string(f.r2));
    VF_REQUIRE(f.slope < 0, fit_rejected, "Maxwellian fit slope is not negative");
    cert.theta = -1 / (2 * f.slope);
    // rho' is the largest amplitude lying below every computed shell value
    double log_rho_p = las[0];
    for (int n = 0; n < n_iter; ++n)
        log_rho_p = std::min(log_rho_p, las[n + 1] + rs[n] * rs[n] / (2 * cert.theta));
    cert.log_rho_prime = log_rho_p;
    cert.log_rho = log_rho_p + (dim / 2.0) * std::log(2 * pi * cert.theta);
    cert.rho = std::exp(cert.log_rho);
    return cert;
}

double choose_eps_n(const Kernel& k, double log_a_n, double r_n, double xi_n, double R,
                    double C_f, const CertConstants& c)
{
    double nu = k.nu();
    int d = k.dim();
    double g2 = std::max(2 + k.gamma(), 0.0);
    double num = 2 * log_a_n + std::log(constant_CQ(k, c)) + (d + k.gamma()) * std::log(r_n)
                 + (d / 2.0 - 1) * std::log(xi_n) + std::log(2 - nu);
    double den = std::log(2 * C_f * k.b0()) + log_jb(R, g2);
    return std::exp((num - den) / (2 - nu));
}

Certificate noncutoff_certificate(double r_V, double log_a, const Kernel& k, const Bounds& b,
                                  const CertConstants& c, const DeltaSchedule& delta,
                                  const std::vector<double>& xi_in, int n_iter, double K_margin)
{
    VF_REQUIRE(!k.is_cutoff(), not_non_cutoff, "the exponential stage needs nu >= 0");
    validate_bounds(b, k);
    delta.validate();
    VF_REQUIRE(r_V > 0 && std::isfinite(log_a), invalid_argument, "need a centred ball");
    VF_REQUIRE(n_iter >= 8 && n_iter <= 10000, invalid_argument, "n_iter must lie in [8, 1e4]");
    auto xi = xi_schedule(xi_in, n_iter);
    double nu = k.nu();
    int d = k.dim();
    double gp = gplus(k);
    double C_f = constant_Cf(k, b, c);

    Certificate cert;
    cert.kind = CertKind::exponential;
    cert.r_V = r_V;
    cert.log_a_ball = log_a;
    cert.K_threshold = k_threshold(nu);
    cert.K = nu == 0 ? 2 : cert.K_threshold + K_margin;

    std::vector<double> rs{r_V}, las{log_a};
    double r = r_V, la = log_a;
    for (int n = 0; n < n_iter; ++n)
    {
        double eps = choose_eps_n(k, la, r, xi[n], std::sqrt(2.0) * r, C_f, c);
        cert.audit.push_back({"noncutoff", n, r, la, eps});
        double logX = std::log(c.C_f_tilde) + 2 * la + (d + k.gamma() - k.gamma_tilde()) * std::log(r)
                      + (d / 2.0 - 1) * std::log(xi[n]);
        double tail = delta.tail_from(n + 1);
        double pen;
        if (nu == 0)
            pen = c.cst_nco * std::abs(logX) * tail * std::exp(gp * std::log(r));
        else
            pen = std::exp(-nu / (2 - nu) * logX + std::log(tail) + gp * std::log(r));
        double dn = delta.at(n + 1);
        double nla = std::log(c.cst_nco) + (dn > 0 ? std::log(dn) : -inf) - pen + 2 * la
                     + (k.gamma() + d) * std::log(r)
                     + (d / 2.0 + 1) * std::log(xi[n]);
        r *= std::sqrt(2.0) * (1 - xi[n]);
        if (!std::isfinite(nla))
            break;
        la = nla;
        rs.push_back(r);
        las.push_back(la);
    }
    cert.audit.push_back({"noncutoff", static_cast<int>(las.size()) - 1, rs.back(), las.back(), 0});
    cert.finite_iterates = static_cast<int>(las.size());
    VF_REQUIRE(las.size() >= 3, non_convergence,
               "non-cutoff recursion leaves the double range after " + std::to_string(las.size())
                   + " iterates");
    // a_{n+1} holds on the shell r_n <= |v| < r_{n+1}: regress it on r_n^K
    std::size_t const m = las.size() - 1;
    std::vector<double> x, y;
    for (std::size_t n = std::min(m / 2, m - 2); n < m; ++n)
    {
        x.push_back(std::pow(rs[n], cert.K));
        y.push_back(las[n + 1]);
    }
    LinFit f = least_squares(x, y);
    cert.fit_r2 = f.r2;
    VF_REQUIRE(f.slope < 0, fit_rejected, "exponential fit slope is not negative");
    cert.C2 = -f.slope;
    // C_1 is the largest amplitude lying below every computed shell value
    double log_c1 = las[0];
    for (std::size_t n = 0; n < m; ++n)
        log_c1 = std::min(log_c1, las[n + 1] + cert.C2 * std::pow(rs[n], cert.K));
    cert.log_C1 = log_c1;
    cert.C1 = std::exp(log_c1);
    return cert;
}

Certificate run_certificate(const Bounds& b, const Kernel& k, const ConvexDomain& dom, double tau,
                            const CertificateOptions& opt)
{
    VF_REQUIRE(tau > 0 && std::isfinite(tau), invalid_argument, "tau must be positive");
    double tau0 = tau / 4;
    UpheavalConfig cfg = upheaval(b, k, dom, tau0, opt.constants, opt.upheaval);
    bool torus = dom.is_torus();
    GrazingConstants gc;
    if (!torus)
    {
        gc.eps = cfg.delta_V / 4;
        gc.p_eps = p_threshold(dom, gc.eps / 2, opt.grazing);
        gc.alpha_x = alpha_x(dom, gc.eps, opt.grazing);
        gc.v_M = 3 * cfg.R_min;
        gc.t_eps = gc.t_at(gc.v_M);
    }
    const GrazingConstants* gp = torus ? nullptr : &gc;
    double t_loc = tau - tau0;
    double DT = delta_T_of(cfg, gp, torus);
    double tau_s = std::min(t_loc, DT);
    SpreadState far = spread_far(cfg, k, tau_s, gp, torus, opt.upheaval.max_iter);
    SpreadState gr = spread_grazing(cfg, k, far, gp, torus, opt.upheaval.max_iter);
    SpreadState ball = merge_centered_ball(gr, t_loc, cfg.C_L, cfg.gamma_plus);

    Certificate cert =
        k.is_cutoff()
            ? maxwellian_certificate(ball.r_V, ball.log_a, k.dim(), k.gamma(), opt.constants,
                                     opt.xi, opt.n_iter)
            : noncutoff_certificate(ball.r_V, ball.log_a, k, b, opt.constants, opt.delta, opt.xi,
                                    opt.n_iter, opt.K_margin);
    cert.tau = tau;
    std::vector<AuditRow> pre;
    for (const auto& s : cfg.steps)
        pre.push_back({"upheaval", s.n, s.r, s.log_A, s.k});
    for (const auto& s : far.far_rows)
        pre.push_back({"far", s.n, s.r, s.log_a, 0});
    for (std::size_t i = 0; i < gr.grazing_rows.size(); ++i)
        pre.push_back({"grazing", gr.grazing_rows[i].n, gr.grazing_rows[i].r,
                       gr.grazing_rows[i].log_a, 0});
    pre.push_back({"ball", 0, ball.r_V, ball.log_a, ball.damping});
    cert.audit.insert(cert.audit.begin(), pre.begin(), pre.end());
    cert.calibrated = opt.constants.calibrated;
    for (const char* name : {"cst_Q", "cst_L", "C_e", "C_f_tilde", "cst_nco"})
        if (std::find(cert.calibrated.begin(), cert.calibrated.end(), name)
            == cert.calibrated.end())
            cert.defaulted.push_back(name);
    return cert;
}

}  // namespace vf
