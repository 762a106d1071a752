//---------------------------------------------------------------------------//
/*!
 * \file knt/harmonics.hpp
 * \brief Real boundary harmonics and harmonic-expansion boundary data.
 *
 * d = 3: real spherical harmonics Y_lm, orthonormal for the surface measure
 * of the unit sphere, flattened as k = l^2 + l + m. d = 2: Fourier modes
 * 1/sqrt(2 pi), cos(l phi)/sqrt(pi), sin(l phi)/sqrt(pi), flattened as
 * k = 0, 2l - 1, 2l.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "knt/geometry.hpp"

namespace knt
{
struct HarmonicIndex
{
    int l;
    int m;  //!< d=3: -l..l; d=2: +1 cosine, -1 sine, 0 constant
};

//! Flattened position of (l, m).
int harmonic_index(int d, int l, int m);
HarmonicIndex harmonic_mode(int d, int k);
//! Number of modes of degree <= L.
int harmonic_count(int d, int L);
//! Laplace-Beltrami eigenvalue l (l + d - 2).
double harmonic_eigenvalue(int d, int l);

//! All real spherical harmonics of degree <= L at a unit vector.
void real_sph_harm_all(int L, Vec3 const& unit, std::vector<double>& out);
double real_sph_harm(int l, int m, Vec3 const& unit);

//! Boundary datum f = sum_k f_k Y_k.
class BoundaryData
{
  public:
    BoundaryData() = default;
    BoundaryData(int d, Eigen::VectorXd coeffs);

    //! Single normalized mode of flattened index k, scaled by \c value.
    static BoundaryData mode(int d, int k, double value = 1.0);
    //! Constant function with value c.
    static BoundaryData constant(int d, double c);

    int dim() const { return d_; }
    Eigen::VectorXd const& coeffs() const { return coeffs_; }
    int size() const { return static_cast<int>(coeffs_.size()); }
    int max_degree() const;
    //! Degree l of the nonzero coefficient set (all degrees present).
    std::vector<int> degrees() const;

    //! f at a unit vector (direction from the center).
    double operator()(Vec3 const& unit) const;

    //! sqrt(sum (1 + lambda_l)^s f_k^2).
    double hs_norm(double s) const;

    //! Coefficients restricted to degree l, zero elsewhere.
    BoundaryData degree_part(int l) const;

    //! Largest value on a dense sampling of the sphere.
    double sampled_max(int n = 64) const;
    double sampled_min(int n = 64) const;

  private:
    int d_{3};
    Eigen::VectorXd coeffs_;
};

}  // namespace knt
