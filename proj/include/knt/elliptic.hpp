//---------------------------------------------------------------------------//
/*!
 * \file knt/elliptic.hpp
 * \brief Per-mode radial solvers for -C_d Laplace + sigma_a on the unit ball.
 *
 * A mode rho(r) Y_lm is written rho = r^l q(r); q then solves a radial
 * Laplacian in dimension 2l + d with an even, regular profile. The
 * conservative second-order scheme is run on h and h/2 and combined by
 * Richardson extrapolation, giving fourth-order nodal values.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "knt/absorption.hpp"
#include "knt/geometry.hpp"
#include "knt/harmonics.hpp"
#include "knt/layer1d.hpp"

namespace knt
{
//! Diffusion coefficient <v_1^2> = 1/d under the uniform measure.
inline double diffusion_coefficient(int d) { return 1.0 / d; }

struct EllipticOptions
{
    int d{3};
    int n{800};  //!< coarse cells on [0, 1]; the fine solve uses 2n
};

//! Radial profile rho_l(r) = r^l q(r) on a uniform grid.
class RadialModeSolution
{
  public:
    int l{0};
    int d{3};
    std::vector<double> r;
    std::vector<double> q;   //!< extrapolated nodal values
    std::vector<double> dq;  //!< fourth-order nodal derivative of q

    double q_at(double rho) const;
    double dq_at(double rho) const;
    double value(double rho) const;
    double derivative(double rho) const;
    //! d rho / dr at r = 1 from a one-sided fourth-order stencil.
    double boundary_derivative() const;
};

/*!
 * Solve -C_d (rho'' + (d-1)/r rho' - l(l+d-2)/r^2 rho) + sigma rho = source
 * with rho(1) = g and rho regular at 0.
 *
 * \c source is in rho form and must vanish like r^l at the origin.
 */
RadialModeSolution solve_mode(int l, AbsorptionField const& sigma, double g,
                              std::function<double(double)> const& source = {},
                              EllipticOptions const& opts = {});

//! Per-mode Dirichlet-to-Neumann value rho_l'(1) / g_l.
double dtn_mode(int l, AbsorptionField const& sigma,
                EllipticOptions const& opts = {});

/*!
 * Relative plug-back residual of the radial equation on interior nodes.
 *
 * Uses fourth-order differences of the nodal q values.
 */
double mode_residual(RadialModeSolution const& sol,
                     AbsorptionField const& sigma,
                     std::function<double(double)> const& source = {});

//---------------------------------------------------------------------------//
//! Field sum_k a_k rho_{l(k)}(r) Y_k(x/|x|) with one unit profile per degree.
class ModalField
{
  public:
    int d{3};
    Eigen::VectorXd coeffs;
    std::map<int, RadialModeSolution> profiles;

    double value(Vec3 const& x) const;
    Vec3 gradient(Vec3 const& x) const;
    //! Boundary normal derivative as boundary data.
    BoundaryData normal_derivative() const;
    //! Boundary trace as boundary data.
    BoundaryData trace() const;
    int max_degree() const;
};

//! Leading-order and first-order interior fields of the expansion.
struct ExpansionFields
{
    double ratio{kLayerRatio};  //!< W1/W2
    ModalField rho00;  //!< -C_d Lap rho = 0, rho = f
    ModalField rhoa0;  //!< -C_d Lap rho + sigma rho = 0, rho = f
    ModalField psi0;   //!< rhoa0 - rho00
    ModalField c0;     //!< harmonic, c0 = -(W1/W2) dn rho00
    ModalField c;      //!< -C_d Lap c + sigma c = -sigma c0, c = -(W1/W2) dn psi0
    ModalField ca;     //!< -C_d Lap ca + sigma ca = 0, ca = -(W1/W2) dn rhoa0
};

ExpansionFields expansion_fields(BoundaryData const& f,
                                 AbsorptionField const& sigma,
                                 double ratio = kLayerRatio,
                                 EllipticOptions const& opts = {});

//! max |c + c0 - ca| / max |ca| over radial profiles.
double ca_consistency(ExpansionFields const& e);

/*!
 * Sobolev norm sum_{|alpha| <= m} ||d^alpha F||^2_{L^2(B_rK)}, square-rooted.
 *
 * Product Gauss quadrature on the ball of radius r_K; derivatives by central
 * differences on h and h/2 with Richardson. Requires r_K + 0.15 <= 1 and
 * 0 <= m <= 6.
 */
double interior_sobolev_norm(ModalField const& field, double r_K, int m);

}  // namespace knt
