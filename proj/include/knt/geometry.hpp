//---------------------------------------------------------------------------//
/*!
 * \file knt/geometry.hpp
 * \brief Ball domain: distances, projections and ray exits.
 *
 * Points are stored in 3D; for d = 2 the third component must be zero.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <Eigen/Dense>

namespace knt
{
class AbsorptionField;

using Vec3 = Eigen::Vector3d;

//! Ball of radius rho_D about a center in dimension 2 or 3.
struct Domain
{
    int d{3};
    double radius{1.0};
    Vec3 center{Vec3::Zero()};

    double diameter() const { return 2 * radius; }
    //! Minimal curvature radius of the boundary.
    double curvature_radius() const { return radius; }
    //! Lebesgue measure of the ball.
    double volume() const;

    //! Throws ArgumentError unless d in {2, 3} and radius > 0.
    void validate() const;
};

struct BoundaryPoint
{
    Vec3 p;  //!< position on the sphere
    Vec3 n;  //!< outward unit normal
};

struct RayExit
{
    BoundaryPoint y;
    double s;  //!< |x - y|
};

//! rho_D - |x - c|; DomainError outside the closed ball.
double distance_to_boundary(Domain const& D, Vec3 const& x);

//! Nearest boundary point; the center maps to c + rho_D e_1.
BoundaryPoint project_to_boundary(Domain const& D, Vec3 const& x);

/*!
 * First boundary point met along x - t v, t >= 0.
 *
 * Throws ArgumentError when |v| differs from 1 by more than 1e-10 and
 * DomainError outside the closed ball.
 */
RayExit ray_exit(Domain const& D, Vec3 const& x, Vec3 const& v);

//! Exit distance s(x, v) for a unit ball at the origin, no validation.
double exit_distance_unit(Vec3 const& x, Vec3 const& v);

/*!
 * Optical depth of sigma along the segment [x, eta].
 *
 * Composite Gauss with 16 points per panel, panels no longer than 1/8 and
 * breaks where the segment crosses the support sphere; exact for constant
 * fields.
 */
double segment_integral(AbsorptionField const& sigma, Vec3 const& x,
                        Vec3 const& eta);

}  // namespace knt
