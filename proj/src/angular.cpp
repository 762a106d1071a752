#include "knt/angular.hpp"

#include <cmath>
#include <numbers>

#include "knt/error.hpp"
#include "knt/quadrature.hpp"

namespace knt
{
void orthonormal_frame(Vec3 const& axis, Vec3& e1, Vec3& e2)
{
    Vec3 a = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    e1 = (a - a.dot(axis) * axis).normalized();
    e2 = axis.cross(e1);
}

AngularQuadrature build_quadrature_about(Vec3 const& axis, int n_polar,
                                         int n_azimuth)
{
    if (n_polar < 2 || n_azimuth < 4)
        throw ArgumentError("build_quadrature: need n_polar >= 2, n_azimuth >= 4");
    Vec3 e1, e2;
    orthonormal_frame(axis, e1, e2);
    AngularQuadrature q;
    q.d = 3;
    q.n_polar = n_polar;
    q.n_azimuth = n_azimuth;
    auto const& g = gauss_legendre(n_polar);
    for (int i = 0; i < n_polar; ++i)
    {
        double mu = g.x[i];
        double st = std::sqrt(std::max(0.0, 1 - mu * mu));
        for (int j = 0; j < n_azimuth; ++j)
        {
            // Half-step offset keeps the node set antipodal for any count.
            double phi = 2 * std::numbers::pi * (j + 0.5) / n_azimuth;
            q.nodes.push_back(mu * axis
                              + st * (std::cos(phi) * e1 + std::sin(phi) * e2));
            q.weights.push_back(0.5 * g.w[i] / n_azimuth);
        }
    }
    return q;
}

AngularQuadrature build_quadrature(int d, int n_polar, int n_azimuth)
{
    if (d == 3)
        return build_quadrature_about(Vec3::UnitZ(), n_polar, n_azimuth);
    if (d == 2)
    {
        if (n_azimuth < 4)
            throw ArgumentError("build_quadrature: need n_azimuth >= 4");
        AngularQuadrature q;
        q.d = 2;
        q.n_azimuth = n_azimuth;
        for (int j = 0; j < n_azimuth; ++j)
        {
            double phi = 2 * std::numbers::pi * (j + 0.5) / n_azimuth;
            q.nodes.emplace_back(std::cos(phi), std::sin(phi), 0.0);
            q.weights.push_back(1.0 / n_azimuth);
        }
        return q;
    }
    throw ArgumentError("build_quadrature: dimension must be 2 or 3");
}

double velocity_average(std::function<double(Vec3 const&)> const& field,
                        AngularQuadrature const& q)
{
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q.weights[i] * field(q.nodes[i]);
    return s;
}

Vec3 velocity_flux(std::function<double(Vec3 const&)> const& field,
                   AngularQuadrature const& q)
{
    Vec3 s = Vec3::Zero();
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q.weights[i] * field(q.nodes[i]) * q.nodes[i];
    return s;
}

Eigen::Matrix3d velocity_second_moment(
    std::function<double(Vec3 const&)> const& field, AngularQuadrature const& q)
{
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q.weights[i] * field(q.nodes[i]) * q.nodes[i]
             * q.nodes[i].transpose();
    return s;
}

}  // namespace knt
