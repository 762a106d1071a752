#include "knt/fit.hpp"

#include <cmath>

#include "knt/error.hpp"

namespace knt
{
LineFit fit_line(std::vector<double> const& x, std::vector<double> const& y)
{
    std::size_t n = x.size();
    if (n != y.size() || n < 2)
        throw ArgumentError("fit_line: need two or more paired samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0)
        throw ArgumentError("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

double loglog_slope(std::vector<double> const& x, std::vector<double> const& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    {
        if (!(x[i] > 0) || !(y[i] > 0))
            throw ArgumentError("loglog_slope: values must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly).slope;
}

}  // namespace knt
