//---------------------------------------------------------------------------//
/*!
 * \file knt/fit.hpp
 * \brief Least-squares line fits used by scaling studies.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <vector>

namespace knt
{
struct LineFit
{
    double slope{0};
    double intercept{0};
    double r2{0};
};

//! Ordinary least squares y = slope x + intercept; needs two distinct x.
LineFit fit_line(std::vector<double> const& x, std::vector<double> const& y);

inline double least_squares_slope(std::vector<double> const& x,
                                  std::vector<double> const& y)
{
    return fit_line(x, y).slope;
}

//! Slope of log y against log x; all values must be positive.
double loglog_slope(std::vector<double> const& x, std::vector<double> const& y);

}  // namespace knt
