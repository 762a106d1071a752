//---------------------------------------------------------------------------//
/*!
 * \file knt/specfun.hpp
 * \brief Exponential integrals, the layer kernel and the layer sources.
 *
 * The layer kernel is E(z) = E_1(|z|)/2. All functions are pure and carry an
 * absolute accuracy budget of about 1e-12.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <utility>

namespace knt
{
//! Exponential integral E_1(x) for x > 0.
double exp_integral_E1(double x);

//! Generalized exponential integral E_n(x), n >= 1, x >= 0 (x > 0 for n=1).
double exp_integral_En(int n, double x);

//! Layer kernel E(z) = E_1(|z|)/2, z != 0.
double kernel_E(double z);

/*!
 * Signed antiderivative F0(z) = int_0^z E.
 *
 * Odd in z; F0(+inf) = 1/2.
 */
double kernel_E_F0(double z);

/*!
 * First-moment antiderivative F1(z) = int_0^z xi E(xi) dxi.
 *
 * Even in z; F1(+inf) = 1/4.
 */
double kernel_E_F1(double z);

//! int_a^b E(z) dz, a <= b; infinite endpoints allowed.
double kernel_E_antiderivative(double a, double b);

//! Quadrature values of the four kernel moments.
struct KernelMoments
{
    double m0_plus;  //!< int_0^inf E
    double m1_plus;  //!< int_0^inf z E
    double m2_plus;  //!< int_0^inf z^2 E
    double m_total;  //!< int_R E
};

KernelMoments kernel_moments();

/*!
 * Layer sources (S1, S2)(y) = int_0^1 exp(-y/s) (s, 1) ds.
 *
 * S1 = E_3 and S2 = E_2; at y = 0 the values are (1/2, 1).
 */
std::pair<double, double> layer_sources(double y);

}  // namespace knt
