//---------------------------------------------------------------------------//
/*!
 * \file knt/quadrature.hpp
 * \brief One-dimensional Gauss-Legendre rules and composite helpers.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <vector>

namespace knt
{
//! Nodes and weights of a 1D rule.
struct Rule1D
{
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
};

/*!
 * Gauss-Legendre rule with n points on [-1, 1].
 *
 * Nodes are ascending. Computed by Newton iteration on P_n; results are
 * cached per n so repeated calls are cheap and thread-safe.
 */
Rule1D const& gauss_legendre(int n);

//! Append the n-point Gauss rule mapped to [a, b] onto \c out.
void append_gauss(Rule1D& out, double a, double b, int n);

//! Composite Gauss rule over consecutive breakpoints.
Rule1D composite_gauss(std::vector<double> const& breaks, int n);

/*!
 * Gauss rule for the weight exp(-t) on [0, h] with n points.
 *
 * Recurrence coefficients come from the Stieltjes procedure on a
 * Gauss-Legendre discretization of the weight; nodes and weights from the
 * Jacobi matrix. The weights sum to -expm1(-h).
 */
Rule1D gauss_exponential(double h, int n);

//! Legendre polynomial P_l(x).
double legendre_p(int l, double x);

}  // namespace knt
