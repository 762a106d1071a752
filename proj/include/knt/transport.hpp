//---------------------------------------------------------------------------//
/*!
 * \file knt/transport.hpp
 * \brief Peierls-equation solver for the mean intensity on the unit ball.
 *
 * The mean intensity solves <u> = b_f + int_D E(x, eta) <u>(eta) d eta with
 * E = exp(-tau)/(4 pi Kn |x - eta|^2) and tau the optical depth of
 * (1 + Kn^2 sigma_a)/Kn. For a radial sigma_a the operator commutes with
 * rotations, so data Y_lm produce <u> = U_l(r) Y_lm and each degree is an
 * independent radial Nystrom system. Ray integrals are taken in the
 * variable p = 1 - exp(-t/Kn), which integrates the free-flight density
 * exactly; this makes the discrete kernel mass and the constant solution
 * exact up to rounding.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "knt/absorption.hpp"
#include "knt/angular.hpp"
#include "knt/geometry.hpp"
#include "knt/harmonics.hpp"

namespace knt
{
//---------------------------------------------------------------------------//
//! Discretization and solver controls.
struct TransportOptions
{
    int n_bulk{48};            //!< radial cells across the bulk
    double first_cell{0.01};   //!< first boundary cell, in units of Kn
    double growth{1.25};       //!< geometric growth away from the boundary
    int mu_per_panel{6};       //!< Gauss points per polar panel
    int t_per_panel{4};        //!< Gauss points per ray panel
    int n_azimuth{16};         //!< azimuths for pointwise angular moments
    double tol{1e-10};         //!< relative residual target
    int max_iter{0};           //!< fixed-point cap; 0 means ceil(10/Kn)
    int anderson_window{5};
    int threads{0};            //!< 0 uses the process default
};

//! Radial nodes 0 = r_0 < ... < r_N = 1, graded toward r = 1.
struct RadialGrid
{
    std::vector<double> r;

    std::size_t size() const { return r.size(); }
    //! Cell index j and local coordinate in [0, 1] for radius rho.
    void locate(double rho, std::size_t& j, double& s) const;
    //! Four-node Lagrange stencil containing rho: nodes first..first+3.
    void stencil(double rho, std::size_t& first, std::array<double, 4>& w) const;
    //! Piecewise-cubic Lagrange interpolation of nodal values.
    double interpolate(Eigen::VectorXd const& values, double rho) const;
};

//! Grid with >= 4 shells per width Kn at the boundary.
RadialGrid make_radial_grid(double kn, TransportOptions const& opts);

//---------------------------------------------------------------------------//
//! Product mesh of radial shells and latitude-longitude cells.
struct SpatialMesh
{
    int d{3};
    std::vector<double> r_edges;
    int n_theta{0};
    int n_phi{0};
    std::vector<Vec3> centers;
    std::vector<double> volumes;

    std::size_t size() const { return centers.size(); }
    double total_volume() const;
};

//! d = 3 uses latitude-longitude cells; d = 2 uses sectors (n_theta unused).
SpatialMesh make_spatial_mesh(std::vector<double> r_edges, int n_theta,
                              int n_phi, int d = 3);

//---------------------------------------------------------------------------//
//! Characteristic orientation: backward solves use the reversed direction.
enum class Orientation
{
    forward,
    backward
};

//! Per-degree radial system (I - K) U = b for unit data of degree l.
struct ModeSystem
{
    int l{0};
    Eigen::MatrixXd K;
    Eigen::VectorXd b;
};

//! Outcome of one per-degree solve.
struct ModeSolve
{
    Eigen::VectorXd U;
    double residual{0};
    int iterations{0};
    bool used_direct{false};
};

//! Mean intensity, its per-degree radial profiles and solver record.
class TransportSolution
{
  public:
    double kn{0};
    BoundaryData f;
    AbsorptionField sigma;
    RadialGrid grid;
    Orientation orientation{Orientation::forward};
    TransportOptions options;
    std::map<int, ModeSolve> modes;  //!< keyed by degree l
    double residual{0};              //!< worst relative residual
    SpatialMesh mesh;
    std::vector<double> mesh_mean;   //!< <u> at mesh cell centers

    //! <u>(x) from the per-degree profiles.
    double mean(Vec3 const& x) const;
    //! Radial profile U_l at rho (unit data).
    double profile(int l, double rho) const;
};

//! Assemble the degree-l Nystrom system.
ModeSystem assemble_mode_system(int l, double kn, AbsorptionField const& sigma,
                                RadialGrid const& grid,
                                TransportOptions const& opts);

//! Anderson-accelerated fixed point with a dense LU fallback.
ModeSolve solve_mode_system(ModeSystem const& sys, double kn,
                            TransportOptions const& opts);

/*!
 * Solve for <u> with boundary data f on the unit ball.
 *
 * Requires a radial sigma and d = 3; mesh may be empty. Raises
 * NumericalError if the achieved residual exceeds 100 tol.
 */
TransportSolution solve_mean_intensity(BoundaryData const& f, double kn,
                                       AbsorptionField const& sigma,
                                       SpatialMesh const& mesh = {},
                                       TransportOptions const& opts = {},
                                       Orientation orientation
                                       = Orientation::forward);

//---------------------------------------------------------------------------//
/*!
 * Quadrature for int_0^s (1/Kn) exp(-tau(t)) g(x - t v) dt.
 *
 * Nodes are Gauss points in p = 1 - exp(-t/Kn) on panels that are geometric
 * in 1 - p; weights include the absorption factor. exit_weight is
 * exp(-tau(s)). With sigma = 0 the weights plus exit_weight sum to 1.
 */
struct RayRule
{
    std::vector<double> t;
    std::vector<double> w;
    double exit_weight{0};
};

RayRule make_ray_rule(Vec3 const& x, Vec3 const& v, double s, double kn,
                      AbsorptionField const& sigma,
                      TransportOptions const& opts);

//! Ray kernel E_d(x, eta) with c_d = |S^{d-1}|.
double kernel_E_D(Vec3 const& x, Vec3 const& eta, double kn,
                  AbsorptionField const& sigma, int d = 3);

//! b_f(x) = < f(y(x,v)) exp(-tau(x,v)) > with a polar rule about x.
double boundary_source(BoundaryData const& f, Vec3 const& x, double kn,
                       AbsorptionField const& sigma,
                       TransportOptions const& opts = {});

//! int_D E(x, eta) d eta by ray quadrature.
double kernel_mass(Vec3 const& x, double kn, AbsorptionField const& sigma,
                   TransportOptions const& opts = {});

//! phi(x) - int_D E(x, eta) phi(eta) d eta by ray quadrature.
double apply_nonlocal_L(std::function<double(Vec3 const&)> const& phi,
                        Vec3 const& x, double kn, AbsorptionField const& sigma,
                        TransportOptions const& opts = {});

//! u(x, v) by characteristics using the solved mean intensity.
double reconstruct_u(TransportSolution const& sol, Vec3 const& x,
                     Vec3 const& v);

//! Angular moments (<u>, <v u>) of the reconstructed intensity at x.
struct AngularMoments
{
    double mean{0};
    Vec3 flux{Vec3::Zero()};
};
AngularMoments reconstruct_moments(TransportSolution const& sol, Vec3 const& x);

/*!
 * Boundary flux (1/Kn) <(v . n) u> at a boundary point.
 *
 * Incoming directions carry the boundary datum (outgoing for backward
 * orientation); the other half is reconstructed.
 */
double boundary_flux(TransportSolution const& sol, Vec3 const& boundary_point);

//---------------------------------------------------------------------------//
//! Polar breakpoints on [-1, 1] graded toward mu = 0.
std::vector<double> graded_polar_breaks();

//! Polar-graded product rule about \c axis with n_azimuth azimuths.
AngularQuadrature graded_quadrature_about(Vec3 const& axis,
                                          TransportOptions const& opts);

//---------------------------------------------------------------------------//
//! Outcome of a supersolution check.
struct SupersolutionReport
{
    std::string kind;
    int samples{0};
    int violations{0};
    double min_margin{0};   //!< min over samples of L[phi] - bound
    Vec3 worst_point{Vec3::Zero()};
    double tolerance{0};
};

//! Constants of the boundary-layer supersolution.
struct Phi2Constants
{
    double C1{1};
    double C2{1};
    double gamma{0.5};
    double mu{0.5};
};

//! C_D - |x|^2 with C_D = 2 max|x|^2 + 2 diam^2 + 4 diam + 4 (= 22).
double phi1(Vec3 const& x);
//! Boundary-layer supersolution with constants c and parameter A >= 1.
double phi2(Vec3 const& x, double kn, double A, Phi2Constants const& c);

/*!
 * Check L[phi1] >= 2 Kn^2 (kind "phi1") or
 * L[phi2] >= exp(-d(x)/(A Kn)) (kind "phi2") at the sample points.
 */
SupersolutionReport verify_supersolution(std::string const& kind, double kn,
                                         double A,
                                         std::vector<Vec3> const& samples,
                                         AbsorptionField const& sigma,
                                         Phi2Constants const& c = {},
                                         TransportOptions const& opts = {});

//! Coarse search over phi2 constants maximizing the worst margin.
Phi2Constants calibrate_phi2(double kn, double A,
                             std::vector<Vec3> const& samples,
                             AbsorptionField const& sigma,
                             TransportOptions const& opts = {});

}  // namespace knt
