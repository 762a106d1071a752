//---------------------------------------------------------------------------//
/*!
 * \file knt/angular.hpp
 * \brief Quadrature on the unit sphere with the normalized uniform measure.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <functional>
#include <vector>

#include "knt/geometry.hpp"

namespace knt
{
//! Nodes and weights with sum w_i = 1.
struct AngularQuadrature
{
    int d{3};
    int n_polar{0};
    int n_azimuth{0};
    std::vector<Vec3> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/*!
 * Product Gauss (in cos theta) times uniform azimuth for d = 3; uniform
 * angles for d = 2 (n_polar ignored). Both are antipodally symmetric.
 */
AngularQuadrature build_quadrature(int d, int n_polar, int n_azimuth);

//! Product rule whose polar axis is the unit vector \c axis.
AngularQuadrature build_quadrature_about(Vec3 const& axis, int n_polar,
                                         int n_azimuth);

//! sum_i w_i field(v_i).
double velocity_average(std::function<double(Vec3 const&)> const& field,
                        AngularQuadrature const& q);

//! First moment sum_i w_i v_i field(v_i).
Vec3 velocity_flux(std::function<double(Vec3 const&)> const& field,
                   AngularQuadrature const& q);

//! Second moment sum_i w_i v_i v_i^T field(v_i).
Eigen::Matrix3d velocity_second_moment(
    std::function<double(Vec3 const&)> const& field,
    AngularQuadrature const& q);

//! Orthonormal pair completing a unit vector to a right-handed frame.
void orthonormal_frame(Vec3 const& axis, Vec3& e1, Vec3& e2);

}  // namespace knt
