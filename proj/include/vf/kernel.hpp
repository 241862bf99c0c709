// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

namespace vf {

enum class PhiKind
{
    power,      //!< phi_scale |z|^gamma
    mollified,  //!< phi_scale max(1, |z|)^gamma
};

enum class Profile
{
    constant,  //!< b = b0
    power,     //!< b0 theta^{-(1+nu)} / sin^{d-2} theta up to pi/2, then decays to 0 at pi
    custom,    //!< user function of theta
};

/*!
 * Angular integration measure for n_b and m_b.
 * polar: integrals in theta against sin^{d-2} theta.
 * sphere: the polar value times |S^{d-2}|, i.e. the full sphere integral.
 */
enum class AngularMeasure
{
    polar,
    sphere,
};

struct KernelParams
{
    std::string name = "custom";
    int dim = 3;
    double gamma = 0;
    double nu = -2;  //!< nu < 0: cutoff
    double b0 = 1;
    double c_phi = 1;
    double C_phi = 1;
    double phi_scale = 1;
    PhiKind phi_kind = PhiKind::power;
    Profile profile = Profile::power;
    std::function<double(double)> b_custom;  //!< theta -> b(cos theta)
};

//! |S^{k}| for k >= 0 (S^0 has two points)
double sphere_area(int k);

//! Validated, immutable collision kernel B = Phi(|z|) b(cos theta)
class Kernel
{
  public:
    const KernelParams& params() const { return p_; }
    int dim() const { return p_.dim; }
    double gamma() const { return p_.gamma; }
    double nu() const { return p_.nu; }
    double b0() const { return p_.b0; }
    bool is_cutoff() const { return p_.nu < 0; }
    //! (2 + gamma)^+
    double gamma_tilde() const { return p_.gamma + 2 > 0 ? p_.gamma + 2 : 0; }

    double phi(double z) const;
    //! b(cos theta) for theta in (0, pi]
    double b(double theta) const;
    //! |S^{d-2}|: converts polar integrals into sphere integrals
    double azimuth_factor() const { return sphere_area(p_.dim - 2); }
    double measure_factor(AngularMeasure m) const
    {
        return m == AngularMeasure::sphere ? azimuth_factor() : 1.0;
    }
    //! Full angular mass int_0^pi b sin^{d-2}; throws NotNonCutoff unless nu < 0
    double n_b_full(AngularMeasure m) const;
    //! int_0^eps b sin^{d-2}; finite for nu < 0
    double small_angle_mass(double eps, AngularMeasure m) const;
    //! Relative deviation of b sin^{d-2} theta^{1+nu} / b0 from 1 at theta
    double asymptote_error(double theta) const;

  private:
    friend Kernel build_kernel(const KernelParams&);
    KernelParams p_;
};

//! Validate parameters. Throws InvalidExponent or AsymptoteMismatch.
Kernel build_kernel(const KernelParams& params);

//! Named presets: hard_spheres, maxwellian_cutoff, soft, noncutoff
KernelParams kernel_preset(const std::string& name, int dim = 3);

struct AngularMasses
{
    double eps = 0;
    double n_b_co = 0;   //!< int_{theta >= eps} b sin^{d-2}
    double m_b_nco = 0;  //!< int_{theta <= eps} b sin^{d-2} theta^2
    double l_b = 0;      //!< inf of b on [pi/4, 3 pi/4]
    AngularMeasure measure = AngularMeasure::polar;
};

//! Throws InvalidArgument for eps outside (0, pi/4), QuadratureTooCoarse
AngularMasses angular_masses(const Kernel& k, double eps,
                             AngularMeasure m = AngularMeasure::polar);

//! inf_{theta in [pi/4, 3 pi/4]} b(cos theta)
double lower_constant(const Kernel& k);

}  // namespace vf
