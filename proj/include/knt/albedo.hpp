//---------------------------------------------------------------------------//
/*!
 * \file knt/albedo.hpp
 * \brief Albedo operator on the real spherical-harmonic boundary basis.
 *
 * Lambda f = (1/Kn) <(v . n) u> on the boundary. Entries are
 * Lambda_jk = int_{dD} Y_j Lambda Y_k. The projection route reconstructs u
 * by characteristics at boundary quadrature points; the per-degree route
 * uses rotation invariance (radial sigma_a makes Lambda diagonal with one
 * value per degree) and integrates outgoing rays at a single pole.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "knt/absorption.hpp"
#include "knt/harmonics.hpp"
#include "knt/transport.hpp"

namespace knt
{
struct AlbedoOptions
{
    TransportOptions transport;
    int boundary_polar{0};    //!< Gauss nodes in cos(theta); 0 chooses L + 2
    int boundary_azimuth{0};  //!< azimuths; 0 chooses 2 L + 4
};

struct AlbedoMatrix
{
    double kn{0};
    std::string sigma_descriptor;
    std::string route;
    Eigen::MatrixXd M;
    std::vector<int> degree;  //!< l of each basis mode
    double solver_tol{0};

    int size() const { return static_cast<int>(M.rows()); }
    //! Laplace-Beltrami eigenvalue of mode k.
    double eigenvalue(int k) const { return degree[k] * (degree[k] + 1.0); }
};

/*!
 * Projection route: transport solve per degree, boundary projection.
 *
 * Backward orientation assembles Lambda' with entries
 * -(1/Kn) int Y_j <(v . n) w_k>, w_k the backward solution for Y_k.
 */
AlbedoMatrix assemble_albedo(AbsorptionField const& sigma, double kn, int n_b,
                             AlbedoOptions const& opts = {},
                             Orientation orientation = Orientation::forward);

//! Per-degree values Lambda_l for l = 0..L.
std::vector<double> albedo_degree_values(AbsorptionField const& sigma,
                                         double kn, int L,
                                         TransportOptions const& opts = {});

//! Diagonal matrix from albedo_degree_values.
AlbedoMatrix assemble_albedo_modal(AbsorptionField const& sigma, double kn,
                                   int n_b, TransportOptions const& opts = {});

//! Largest singular value of W A W with W = diag((1 + lambda_l)^{-s/2}).
double operator_norm(Eigen::MatrixXd const& A, std::vector<int> const& degree,
                     double s);

//! Lambda f on the basis span.
BoundaryData apply_albedo(AlbedoMatrix const& A, BoundaryData const& f);

//---------------------------------------------------------------------------//
struct IdentityReport
{
    double lhs{0};
    double rhs{0};
    double residual{0};  //!< |lhs - rhs| / scale
    double scale{0};
};

/*!
 * Weak form: <Lambda f, g> against
 * -int sigma <u> g~ + (1/Kn) int <v u> . grad g~ with g~ = sum g_k r^l Y_k.
 *
 * Volume integrals use radial Gauss panels graded toward the boundary in
 * units of Kn and a product angular rule exact for the angular degrees
 * involved; each \c level halves the radial panels.
 */
IdentityReport weak_form_check(AbsorptionField const& sigma, double kn,
                               BoundaryData const& f, BoundaryData const& g,
                               int level = 1, AlbedoOptions const& opts = {});

//! <Lambda f, g> against -(1/Kn) int f <(v . n) w> with w the backward solve.
IdentityReport adjoint_check(AbsorptionField const& sigma, double kn,
                             BoundaryData const& f, BoundaryData const& g,
                             AlbedoOptions const& opts = {});

//---------------------------------------------------------------------------//
struct AprioriRow
{
    double kn{0};
    double lhs{0};       //!< ||(Lambda_sigma - Lambda_0) f||_{H^{-1/2}}
    double rho_norm{0};  //!< ||rho00||_{H^{s0}(K)}
    double f_norm{0};    //!< ||f||_{H^{s1}}
    double rhs{0};       //!< rho_norm + Kn f_norm
    double C{0};         //!< lhs / rhs
};

struct AprioriSweep
{
    std::vector<AprioriRow> rows;
    double spread{0};  //!< max C / min C
};

AprioriSweep albedo_apriori_sweep(AbsorptionField const& sigma,
                                  BoundaryData const& f,
                                  std::vector<double> const& kn_list,
                                  int s0 = 4, double s1 = 5.5,
                                  TransportOptions const& opts = {});

//! Per-degree comparison of Lambda_sigma - Lambda_0 with the DtN difference.
struct DtnRow
{
    double kn{0};
    int l{0};
    double albedo_diff{0};
    double dtn_diff{0};
    double ratio{0};  //!< albedo_diff / dtn_diff
};

std::vector<DtnRow> dtn_limit_study(AbsorptionField const& sigma,
                                    std::vector<double> const& kn_list, int L,
                                    TransportOptions const& opts = {});

/*!
 * Normalization N fitted once from degree 0 by linear extrapolation in Kn
 * over the two smallest Kn; per-degree rates are least-squares log-log
 * slopes of |ratio - N| against Kn.
 */
struct DtnFit
{
    double normalization{0};
    std::vector<double> rate;  //!< indexed by l
};

DtnFit fit_dtn_limit(std::vector<DtnRow> const& rows);

}  // namespace knt
