#include "knt/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "knt/error.hpp"

namespace knt
{
AbsorptionField::AbsorptionField() = default;

AbsorptionField AbsorptionField::from_samples(std::vector<double> samples,
                                              double r_support,
                                              std::string descriptor)
{
    if (samples.size() < 5 || !(r_support > 0))
        throw ArgumentError("AbsorptionField: need >= 5 samples, r_K > 0");
    for (double v : samples)
        if (!(v >= 0) || !std::isfinite(v))
            throw ArgumentError("AbsorptionField: samples must be >= 0");
    AbsorptionField f;
    f.r_support_ = r_support;
    f.values_ = std::move(samples);
    f.h_ = r_support / (f.values_.size() - 1);
    f.descriptor_ = std::move(descriptor);
    f.finalize();
    return f;
}

AbsorptionField AbsorptionField::from_function(std::function<double(double)> g,
                                               double r_support,
                                               std::string descriptor,
                                               int n_samples)
{
    if (n_samples < 5)
        throw ArgumentError("AbsorptionField: need >= 5 samples");
    std::vector<double> s(n_samples);
    for (int i = 0; i < n_samples; ++i)
        s[i] = g(r_support * i / (n_samples - 1));
    auto f = from_samples(std::move(s), r_support, std::move(descriptor));
    f.profile_ = std::move(g);
    return f;
}

AbsorptionField AbsorptionField::bump(double amplitude, double r_support)
{
    if (!(amplitude >= 0))
        throw ArgumentError("AbsorptionField::bump: amplitude must be >= 0");
    std::ostringstream os;
    os << "bump(amplitude=" << amplitude << ",r_support=" << r_support << ")";
    return from_function(
        [=](double r) {
            double t = r / r_support;
            if (t >= 1)
                return 0.0;
            return amplitude * std::exp(1 - 1 / (1 - t * t));
        },
        r_support, os.str());
}

AbsorptionField AbsorptionField::constant(double value, double radius)
{
    std::ostringstream os;
    os << "constant(" << value << ")";
    // Support pushed past the ball so the field is flat on all of it.
    return from_function([value](double) { return value; },
                         radius * (1 + 1e-9), os.str(), 9);
}

void AbsorptionField::finalize()
{
    std::size_t n = values_.size();
    slopes_.assign(n, 0.0);
    auto v = [&](long i) {
        // Even extension at r = 0; zero continuation past r_K
        if (i < 0)
            return values_[-i];
        if (i >= static_cast<long>(n))
            return values_.back() == 0 ? 0.0 : values_.back();
        return values_[i];
    };
    for (long i = 0; i < static_cast<long>(n); ++i)
    {
        slopes_[i] = (v(i - 2) - 8 * v(i - 1) + 8 * v(i + 1) - v(i + 2))
                     / (12 * h_);
    }
    slopes_[0] = 0;
    max_ = *std::max_element(values_.begin(), values_.end());
    m_bound_ = 0;
    for (long i = 0; i < static_cast<long>(n); ++i)
        m_bound_ = std::max(
            m_bound_, std::abs(v(i - 1) - 2 * v(i) + v(i + 1)) / (h_ * h_));
}

double AbsorptionField::operator()(double r) const
{
    if (values_.empty() || r > r_support_)
        return 0.0;
    if (profile_)
        return profile_(r);
    if (r >= r_support_)
        return values_.back();
    double u = r / h_;
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u),
                                          values_.size() - 2);
    double t = u - i;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    double val = h00 * values_[i] + h10 * h_ * slopes_[i]
                 + h01 * values_[i + 1] + h11 * h_ * slopes_[i + 1];
    return std::max(0.0, val);
}

}  // namespace knt
