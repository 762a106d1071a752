//---------------------------------------------------------------------------//
/*!
 * \file knt/absorption.hpp
 * \brief Radial absorption coefficient sigma_a(r).
 */
//---------------------------------------------------------------------------//
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "knt/geometry.hpp"

namespace knt
{
/*!
 * Nonnegative radial profile tabulated on a uniform grid over [0, r_K].
 *
 * Fields built from a closed-form profile evaluate it directly; fields
 * built from raw samples use a cubic Hermite interpolant whose slopes are
 * fourth-order differences, with negative overshoot clamped to zero. The
 * field vanishes for r > r_K.
 */
class AbsorptionField
{
  public:
    //! Identically zero field.
    AbsorptionField();

    //! Tabulate a profile on n_samples uniform nodes over [0, r_support].
    static AbsorptionField from_function(std::function<double(double)> f,
                                         double r_support,
                                         std::string descriptor,
                                         int n_samples = 4097);

    //! A exp(1 - 1/(1 - (r/r_K)^2)) for r < r_K, zero beyond.
    static AbsorptionField bump(double amplitude, double r_support);

    /*!
     * Constant value on the whole ball of radius \c radius.
     *
     * Not compactly supported inside the domain; intended for checks.
     */
    static AbsorptionField constant(double value, double radius = 1.0);

    //! Build from samples on a uniform grid over [0, r_support].
    static AbsorptionField from_samples(std::vector<double> samples,
                                        double r_support,
                                        std::string descriptor);

    //! sigma_a at radius r >= 0.
    double operator()(double r) const;
    //! sigma_a at a point (origin-centred).
    double at(Vec3 const& x) const { return (*this)(x.norm()); }

    double r_support() const { return r_support_; }
    //! Largest sample value.
    double max_value() const { return max_; }
    //! Finite-difference bound on |sigma''| over the samples.
    double smoothness_bound() const { return m_bound_; }
    bool is_zero() const { return max_ == 0; }
    //! Support strictly inside a domain of radius \c domain_radius.
    bool compactly_supported(double domain_radius) const
    {
        return r_support_ < domain_radius;
    }
    std::string const& descriptor() const { return descriptor_; }
    std::vector<double> const& samples() const { return values_; }

  private:
    double r_support_{0};
    double h_{1};
    std::vector<double> values_;
    std::vector<double> slopes_;
    std::function<double(double)> profile_;
    double max_{0};
    double m_bound_{0};
    std::string descriptor_{"zero"};

    void finalize();
};

}  // namespace knt
