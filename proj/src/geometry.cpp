#include "knt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "knt/absorption.hpp"
#include "knt/error.hpp"
#include "knt/quadrature.hpp"

namespace knt
{
double Domain::volume() const
{
    return d == 2 ? std::numbers::pi * radius * radius
                  : 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

void Domain::validate() const
{
    if (d != 2 && d != 3)
        throw ArgumentError("Domain: dimension must be 2 or 3");
    if (!(radius > 0))
        throw ArgumentError("Domain: radius must be positive");
}

namespace
{
void check_inside(Domain const& D, Vec3 const& x, char const* who)
{
    if ((x - D.center).norm() > D.radius * (1 + 1e-12))
        throw DomainError(std::string(who) + ": point outside the closed ball");
}
}  // namespace

double distance_to_boundary(Domain const& D, Vec3 const& x)
{
    check_inside(D, x, "distance_to_boundary");
    return std::max(0.0, D.radius - (x - D.center).norm());
}

BoundaryPoint project_to_boundary(Domain const& D, Vec3 const& x)
{
    check_inside(D, x, "project_to_boundary");
    Vec3 r = x - D.center;
    double nr = r.norm();
    Vec3 n = nr > 0 ? Vec3(r / nr) : Vec3::UnitX();
    return {D.center + D.radius * n, n};
}

double exit_distance_unit(Vec3 const& x, Vec3 const& v)
{
    // |x - s v|^2 = 1 with s >= 0: s = x.v + sqrt((x.v)^2 + 1 - |x|^2)
    double b = x.dot(v);
    double c = std::max(0.0, 1 - x.squaredNorm());
    double disc = b * b + c;
    double root = std::sqrt(disc);
    // Stable form when b < 0: s = c / (root - b)
    if (b >= 0)
        return b + root;
    return root - b > 0 ? c / (root - b) : 0.0;
}

RayExit ray_exit(Domain const& D, Vec3 const& x, Vec3 const& v)
{
    if (std::abs(v.norm() - 1) > 1e-10)
        throw ArgumentError("ray_exit: direction must be a unit vector");
    check_inside(D, x, "ray_exit");
    Vec3 xs = (x - D.center) / D.radius;
    double s = D.radius * exit_distance_unit(xs, v);
    Vec3 y = x - s * v;
    Vec3 n = (y - D.center).normalized();
    return {{D.center + D.radius * n, n}, s};
}

double segment_integral(AbsorptionField const& sigma, Vec3 const& x,
                        Vec3 const& eta)
{
    Vec3 dvec = eta - x;
    double len = dvec.norm();
    if (len == 0 || sigma.is_zero())
        return 0;
    // Break at support crossings |x + t dvec| = r_K, t in (0, 1)
    std::vector<double> br{0.0, 1.0};
    double rk = sigma.r_support();
    double A = dvec.squaredNorm(), B = x.dot(dvec), C = x.squaredNorm() - rk * rk;
    double disc = B * B - A * C;
    if (disc > 0)
    {
        double sq = std::sqrt(disc);
        for (double t : {(-B - sq) / A, (-B + sq) / A})
            if (t > 0 && t < 1)
                br.push_back(t);
    }
    std::sort(br.begin(), br.end());
    std::vector<double> panels{0.0};
    for (std::size_t k = 0; k + 1 < br.size(); ++k)
    {
        int np = std::max(1, static_cast<int>(std::ceil(8 * len * (br[k + 1] - br[k]))));
        for (int p = 1; p <= np; ++p)
            panels.push_back(br[k] + (br[k + 1] - br[k]) * p / np);
    }
    auto rule = composite_gauss(panels, 16);
    double total = 0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        total += rule.w[i] * sigma.at(x + rule.x[i] * dvec);
    return total * len;
}

}  // namespace knt
