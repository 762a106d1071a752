#include "knt/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "knt/error.hpp"
#include "knt/quadrature.hpp"

namespace knt
{
namespace
{
double e1_series(double x)
{
    // E1 = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0;
    double term = 1;
    for (int k = 1; k < 60; ++k)
    {
        term *= -x / k;
        double add = term / k;
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum))
            break;
    }
    return -std::numbers::egamma - std::log(x) - sum;
}

double e1_continued_fraction(double x)
{
    // Modified Lentz on E1 = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    constexpr double tiny = 1e-300;
    double b = x + 1;
    double c = 1 / tiny;
    double d = 1 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i)
    {
        double a = -static_cast<double>(i) * i;
        b += 2;
        d = 1 / (a * d + b);
        c = b + a / c;
        double del = c * d;
        h *= del;
        if (std::abs(del - 1) < 1e-16)
            break;
    }
    return h * std::exp(-x);
}
}  // namespace

double exp_integral_E1(double x)
{
    if (!(x > 0))
        throw DomainError("exp_integral_E1: argument must be positive");
    if (x > 700)
        return 0;
    return x <= 1 ? e1_series(x) : e1_continued_fraction(x);
}

double exp_integral_En(int n, double x)
{
    if (n < 1 || x < 0)
        throw DomainError("exp_integral_En: need n >= 1 and x >= 0");
    if (x == 0)
    {
        if (n == 1)
            throw DomainError("exp_integral_En: E_1 is singular at 0");
        return 1.0 / (n - 1);
    }
    if (x > 700)
        return 0;
    // Upward recurrence E_{k+1} = (e^{-x} - x E_k)/k; the absolute error
    // stays at the level of E_1 for the small n used here.
    double ex = std::exp(-x);
    double e = exp_integral_E1(x);
    for (int k = 1; k < n; ++k)
        e = (ex - x * e) / k;
    return e;
}

double kernel_E(double z)
{
    if (z == 0)
        throw DomainError("kernel_E: logarithmic singularity at 0");
    return 0.5 * exp_integral_E1(std::abs(z));
}

double kernel_E_F0(double z)
{
    if (std::isinf(z))
        return z > 0 ? 0.5 : -0.5;
    double a = std::abs(z);
    double v = 0.5 * (1 - exp_integral_En(2, a));
    return z < 0 ? -v : v;
}

double kernel_E_F1(double z)
{
    if (std::isinf(z))
        return 0.25;
    double a = std::abs(z);
    return 0.5 * (0.5 - a * exp_integral_En(2, a) - exp_integral_En(3, a));
}

double kernel_E_antiderivative(double a, double b)
{
    if (a > b)
        throw ArgumentError("kernel_E_antiderivative: need a <= b");
    return kernel_E_F0(b) - kernel_E_F0(a);
}

KernelMoments kernel_moments()
{
    // Substituting z = t^2 leaves an integrable t log t term at 0;
    // geometric panels resolve it and the exponential tail.
    auto moment = [](int k) {
        std::vector<double> br{0.0};
        for (double t = 1e-6; t < 1.0 / 64; t *= 2)
            br.push_back(t);
        for (double t = 1.0 / 64; t < 7.0; t *= 1.25)
            br.push_back(t);
        br.push_back(7.0);  // z = 49: tail below 1e-21
        auto rule = composite_gauss(br, 12);
        double s = 0;
        for (std::size_t i = 0; i < rule.size(); ++i)
        {
            double t = rule.x[i];
            double z = t * t;
            s += rule.w[i] * 2 * t * std::pow(z, k) * kernel_E(z);
        }
        return s;
    };
    KernelMoments m;
    m.m0_plus = moment(0);
    m.m1_plus = moment(1);
    m.m2_plus = moment(2);
    // Negative half-line evaluated on its own; evenness is not assumed here.
    {
        std::vector<double> br{0.0};
        for (double t = 1e-6; t < 1.0 / 64; t *= 2)
            br.push_back(t);
        for (double t = 1.0 / 64; t < 7.0; t *= 1.25)
            br.push_back(t);
        br.push_back(7.0);
        auto rule = composite_gauss(br, 12);
        double neg = 0;
        for (std::size_t i = 0; i < rule.size(); ++i)
            neg += rule.w[i] * 2 * rule.x[i]
                   * kernel_E(-rule.x[i] * rule.x[i]);
        m.m_total = m.m0_plus + neg;
    }
    return m;
}

std::pair<double, double> layer_sources(double y)
{
    if (y < 0)
        throw DomainError("layer_sources: y must be nonnegative");
    if (y == 0)
        return {0.5, 1.0};
    return {exp_integral_En(3, y), exp_integral_En(2, y)};
}

}  // namespace knt
