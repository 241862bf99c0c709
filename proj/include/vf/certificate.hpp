// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "vf/geometry.hpp"
#include "vf/grazing.hpp"
#include "vf/kernel.hpp"

namespace vf {

//! A priori bounds on the solution
struct Bounds
{
    double E_f = 0;       //!< sup of the local energy
    double Eprime_f = 0;  //!< sup of the weighted energy (non-cutoff)
    double Lp_f = 0;      //!< sup of the local L^p norm (gamma < 0)
    double p_gamma = 0;
    double W_f = 0;       //!< W^{2,inf} sup (non-cutoff)
    double M = 0;         //!< total mass
    double E = 0;         //!< total energy
    double R_X = 0;       //!< domain radius
};

//! Throws MissingBound when a bound required by the kernel class is absent
void validate_bounds(const Bounds& b, const Kernel& k);

//! Multiplicative constants of the recursions
struct CertConstants
{
    double cst_Q = 1;      //!< spreading constant factor
    double cst_L = 1;      //!< loss bound factor
    double C_e = 1;        //!< Maxwellian stage constant
    double C_f_tilde = 1;  //!< non-cutoff penalty constant
    double cst_nco = 1;    //!< non-cutoff stage factor
    double eps0 = 0.1;     //!< angular cutoff used for the non-cutoff centred-ball stage
    std::vector<std::string> calibrated;  //!< names of constants taken from calibration
};

//! C_Q = cst_Q l_b c_Phi
double constant_CQ(const Kernel& k, const CertConstants& c);
//! C_L = cst_L n_b C_Phi (E_f + L^p_f)
double constant_CL(const Kernel& k, const Bounds& b, const CertConstants& c);
//! C_f = cst_L C_Phi (E_f + E'_f W_f + L^p_f)
double constant_Cf(const Kernel& k, const Bounds& b, const CertConstants& c);

struct UpheavalOptions
{
    double delta = 0;        //!< initial window; 0 means 2 tau0
    double v1_norm = 0;      //!< |v_1|
    double dx_frac = 0.1;    //!< delta'_X = dx_frac R_min
    double dv_frac = 0.1;    //!< delta'_V = dv_frac R_min
    double dt_prime = 0;     //!< delta'_T; 0 means tau0 / 2
    int max_anchors = 1024;  //!< cap on the spatial cover size
    int max_iter = 10000;
};

//! Monomial lower bound alpha_n(s) >= A s^k for s <= s_lim
struct UpheavalStep
{
    int n = 0;
    double r = 0;
    double log_A = 0;
    double k = 0;
    double log_s_lim = 0;
};

struct UpheavalConfig
{
    int dim = 3;
    double tau0 = 0;
    double Delta = 0;
    double alpha = 0;      //!< M R_X^2 + E
    double R_mass = 0;     //!< sqrt(2 alpha / M)
    double log_a_init = 0; //!< log M / (8 Vol(B(0, R_mass))^2)
    double v1_norm = 0;
    Vec x1{};
    double d_U = 0;
    double C_Q = 0;
    double C_L = 0;
    double gamma = 0;
    double gamma_plus = 0;
    int n = 0;             //!< iterations until |v_1| + r_n >= 2 d_U / tau0
    double r_n = 0;
    double R_min = 0;      //!< |v_1| + r_n
    double log_alpha_n = 0;
    double log_a0 = 0;
    double delta_T = 0;
    double delta_X = 0;
    double delta_V = 0;
    double cover_radius = 0;         //!< radius of the cover balls actually used
    double log10_NX_required = 0;    //!< cover size at radius delta_X / 2^n
    std::vector<Vec> x_anchor;
    std::vector<double> v_norm;      //!< |v_i| = 2 |x_i - x_1| / tau0
    std::vector<UpheavalStep> steps;
};

UpheavalConfig upheaval(const Bounds& b, const Kernel& k, const ConvexDomain& dom, double tau0,
                        const CertConstants& c = {}, const UpheavalOptions& opt = {});

//! alpha_n(t) of the upheaval recursion by nested Gauss-Legendre quadrature (n <= 4)
double upheaval_alpha_quadrature(const UpheavalConfig& cfg, int n, double t, int nodes = 24);

enum class SpreadMode
{
    far,
    grazing,
    merged,
    final,
};

struct SpreadRow
{
    int n = 0;
    double r = 0;
    double log_a = 0;
};

struct SpreadState
{
    SpreadMode mode = SpreadMode::far;
    double tau = 0;
    double Delta_T = 0;
    double R = 0;
    double tau1 = 0;
    double tau2 = 0;
    double l = 0;
    double v_m = 0;
    // far
    int N1 = 0;
    int N2 = 0;
    double alpha = 0;       //!< l / (2^{N2} R)
    double log_a_far = 0;   //!< a(l, tau1, Delta_T)
    std::vector<SpreadRow> far_rows;
    // grazing
    std::vector<double> xi;      //!< per distinct anchor speed
    std::vector<int> N_max;
    std::vector<double> anchor_speed;
    double r_V = 0;
    double log_b = 0;
    std::vector<SpreadRow> grazing_rows;  //!< rows of the minimising anchor
    // merged
    double log_a = 0;
    double damping = 1;
};

//! Delta_T = min(delta_T, t_{delta_V/4}(3 R_min)); delta_T on the torus
double delta_T_of(const UpheavalConfig& cfg, const GrazingConstants* gc, bool torus);

//! Far-from-boundary spreading (N1, N2, a(l, tau1, Delta_T)). Throws NonConvergence.
SpreadState spread_far(const UpheavalConfig& cfg, const Kernel& k, double tau,
                       const GrazingConstants* gc, bool torus, int max_iter = 10000);

/*!
 * Grazing spreading on top of a far state. Throws GrazingConstantsMissing
 * for bounded domains without constants.
 */
SpreadState spread_grazing(const UpheavalConfig& cfg, const Kernel& k, const SpreadState& far,
                           const GrazingConstants* gc, bool torus, int max_iter = 10000);

//! Grazing radius recursion r_{n+1} = sqrt2 (1 - xi) r_n - delta_V / 4
std::vector<double> grazing_radii(double delta_V, double xi, int n);
//! Largest xi = cap / 2^j for which the grazing radii grow
double grazing_xi(double delta_V);
constexpr double grazing_xi_cap() { return 0.25 - 3.0 / (16.0 * 1.4142135623730951); }

//! a(tau) = min(far, grazing) and the damping for t beyond Delta_T
SpreadState merge_centered_ball(const SpreadState& grazing, double t, double C_L,
                                double gamma_plus);

//! Delta_n schedule; the default is 6 / (pi^2 (n + 1)^2)
struct DeltaSchedule
{
    std::vector<double> values;  //!< explicit finite schedule, empty for the default
    double at(int n) const;
    double tail_from(int n) const;  //!< sum_{k >= n} Delta_k
    void validate() const;          //!< throws ScheduleInvalid
};

enum class CertKind
{
    maxwellian,
    exponential,
};

struct AuditRow
{
    std::string stage;
    int n = 0;
    double r = 0;
    double log_a = 0;
    double aux = 0;  //!< xi_n, eps_n or k_n depending on the stage
};

struct Certificate
{
    CertKind kind = CertKind::maxwellian;
    double tau = 0;
    double r_V = 0;
    double log_a_ball = 0;
    // maxwellian
    double log_rho_prime = 0;
    double log_rho = 0;
    double rho = 0;
    double theta = 0;
    double fit_r2 = 0;
    // exponential
    double log_C1 = 0;
    double C1 = 0;
    double C2 = 0;
    double K = 2;
    double K_threshold = 2;
    int finite_iterates = 0;
    std::vector<AuditRow> audit;
    std::vector<std::string> calibrated;
    std::vector<std::string> defaulted;
};

//! K threshold 2 log(2 + 2 nu / (2 - nu)) / log 2
double k_threshold(double nu);

/*!
 * Maxwellian stage from a centred ball (r_V, a). xi empty means 1/(n+2)^2.
 * Throws FitRejected.
 */
Certificate maxwellian_certificate(double r_V, double log_a, int dim, double gamma,
                                   const CertConstants& c, const std::vector<double>& xi,
                                   int n_iter);

//! eps_n from the closed-form inversion of the small-angle mass asymptote
double choose_eps_n(const Kernel& k, double log_a_n, double r_n, double xi_n, double R,
                    double C_f, const CertConstants& c);

/*!
 * Non-cutoff stage from a centred ball. Throws ScheduleInvalid, NotNonCutoff,
 * NonConvergence when fewer than three iterates stay in double range.
 */
Certificate noncutoff_certificate(double r_V, double log_a, const Kernel& k, const Bounds& b,
                                  const CertConstants& c, const DeltaSchedule& delta,
                                  const std::vector<double>& xi, int n_iter,
                                  double K_margin = 0.1);

struct CertificateOptions
{
    UpheavalOptions upheaval;
    CertConstants constants;
    GrazingOptions grazing;
    DeltaSchedule delta;
    std::vector<double> xi;
    int n_iter = 64;
    double K_margin = 0.1;
};

/*!
 * Full pipeline at time tau: upheaval at tau0 = tau/4, spreading to the
 * centred ball at 3 tau/4 after the upheaval, then the Maxwellian or
 * exponential stage.
 */
Certificate run_certificate(const Bounds& b, const Kernel& k, const ConvexDomain& dom, double tau,
                            const CertificateOptions& opt = {});

}  // namespace vf
