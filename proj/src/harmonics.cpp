#include "knt/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "knt/error.hpp"

namespace knt
{
int harmonic_index(int d, int l, int m)
{
    if (d == 3)
        return l * l + l + m;
    if (l == 0)
        return 0;
    return m > 0 ? 2 * l - 1 : 2 * l;
}

HarmonicIndex harmonic_mode(int d, int k)
{
    if (k < 0)
        throw ArgumentError("harmonic_mode: negative index");
    if (d == 3)
    {
        int l = static_cast<int>(std::floor(std::sqrt(static_cast<double>(k))));
        while (l * l > k)
            --l;
        while ((l + 1) * (l + 1) <= k)
            ++l;
        return {l, k - l * l - l};
    }
    if (k == 0)
        return {0, 0};
    return {(k + 1) / 2, (k % 2) ? 1 : -1};
}

int harmonic_count(int d, int L)
{
    return d == 3 ? (L + 1) * (L + 1) : 2 * L + 1;
}

double harmonic_eigenvalue(int d, int l)
{
    return static_cast<double>(l) * (l + d - 2);
}

void real_sph_harm_all(int L, Vec3 const& unit, std::vector<double>& out)
{
    out.assign((L + 1) * (L + 1), 0.0);
    double ct = std::clamp(unit.z(), -1.0, 1.0);
    double rho = std::hypot(unit.x(), unit.y());
    double st = rho;
    double cphi = rho > 0 ? unit.x() / rho : 1.0;
    double sphi = rho > 0 ? unit.y() / rho : 0.0;

    // Normalized associated Legendre values, no Condon-Shortley phase.
    std::vector<double> pmm(L + 1);
    pmm[0] = std::sqrt(1 / (4 * std::numbers::pi));
    for (int m = 1; m <= L; ++m)
        pmm[m] = std::sqrt((2.0 * m + 1) / (2.0 * m)) * st * pmm[m - 1];

    double cm = 1, sm = 0;  // cos(m phi), sin(m phi)
    for (int m = 0; m <= L; ++m)
    {
        if (m > 0)
        {
            double c2 = cm * cphi - sm * sphi;
            sm = sm * cphi + cm * sphi;
            cm = c2;
        }
        double p2 = 0, p1 = pmm[m];
        for (int l = m; l <= L; ++l)
        {
            double p;
            if (l == m)
                p = pmm[m];
            else if (l == m + 1)
                p = std::sqrt(2.0 * m + 3) * ct * pmm[m];
            else
            {
                double a = std::sqrt((4.0 * l * l - 1) / (1.0 * l * l - m * m));
                double b = std::sqrt(((l - 1.0) * (l - 1) - m * m)
                                     / (4.0 * (l - 1) * (l - 1) - 1));
                p = a * (ct * p1 - b * p2);
            }
            if (l > m)
            {
                p2 = p1;
                p1 = p;
            }
            else
            {
                p1 = p;
                p2 = 0;
            }
            if (m == 0)
                out[l * l + l] = p;
            else
            {
                out[l * l + l + m] = std::numbers::sqrt2 * p * cm;
                out[l * l + l - m] = std::numbers::sqrt2 * p * sm;
            }
        }
    }
}

double real_sph_harm(int l, int m, Vec3 const& unit)
{
    std::vector<double> y;
    real_sph_harm_all(l, unit, y);
    return y[l * l + l + m];
}

//---------------------------------------------------------------------------//
BoundaryData::BoundaryData(int d, Eigen::VectorXd coeffs)
    : d_(d), coeffs_(std::move(coeffs))
{
    if (d != 2 && d != 3)
        throw ArgumentError("BoundaryData: dimension must be 2 or 3");
}

BoundaryData BoundaryData::mode(int d, int k, double value)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 1);
    c(k) = value;
    return BoundaryData(d, c);
}

BoundaryData BoundaryData::constant(int d, double c)
{
    double y0 = d == 3 ? std::sqrt(1 / (4 * std::numbers::pi))
                       : std::sqrt(1 / (2 * std::numbers::pi));
    return mode(d, 0, c / y0);
}

int BoundaryData::max_degree() const
{
    if (coeffs_.size() == 0)
        return 0;
    return harmonic_mode(d_, static_cast<int>(coeffs_.size()) - 1).l;
}

std::vector<int> BoundaryData::degrees() const
{
    std::vector<int> ls;
    for (int k = 0; k < size(); ++k)
    {
        if (coeffs_(k) == 0)
            continue;
        int l = harmonic_mode(d_, k).l;
        if (ls.empty() || ls.back() != l)
            ls.push_back(l);
    }
    return ls;
}

double BoundaryData::operator()(Vec3 const& unit) const
{
    if (coeffs_.size() == 0)
        return 0;
    if (d_ == 3)
    {
        std::vector<double> y;
        real_sph_harm_all(max_degree(), unit, y);
        double s = 0;
        for (int k = 0; k < size(); ++k)
            s += coeffs_(k) * y[k];
        return s;
    }
    double phi = std::atan2(unit.y(), unit.x());
    double s = coeffs_(0) / std::sqrt(2 * std::numbers::pi);
    for (int k = 1; k < size(); ++k)
    {
        auto [l, m] = harmonic_mode(2, k);
        s += coeffs_(k) * (m > 0 ? std::cos(l * phi) : std::sin(l * phi))
             / std::sqrt(std::numbers::pi);
    }
    return s;
}

double BoundaryData::hs_norm(double s) const
{
    double sum = 0;
    for (int k = 0; k < size(); ++k)
    {
        int l = harmonic_mode(d_, k).l;
        sum += std::pow(1 + harmonic_eigenvalue(d_, l), s) * coeffs_(k)
               * coeffs_(k);
    }
    return std::sqrt(sum);
}

BoundaryData BoundaryData::degree_part(int l) const
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
    for (int k = 0; k < size(); ++k)
        if (harmonic_mode(d_, k).l == l)
            c(k) = coeffs_(k);
    return BoundaryData(d_, c);
}

namespace
{
template<class Op>
double sampled_extreme(BoundaryData const& f, int n, Op better)
{
    double best = f(Vec3::UnitZ());
    for (int i = 0; i <= n; ++i)
    {
        double theta = std::numbers::pi * i / n;
        int na = f.dim() == 3 ? 2 * n : 1;
        for (int j = 0; j < na; ++j)
        {
            double phi = 2 * std::numbers::pi * j / na;
            Vec3 u = f.dim() == 3 ? Vec3(std::sin(theta) * std::cos(phi),
                                         std::sin(theta) * std::sin(phi),
                                         std::cos(theta))
                                  : Vec3(std::cos(2 * theta), std::sin(2 * theta), 0);
            double v = f(u);
            if (better(v, best))
                best = v;
        }
    }
    return best;
}
}  // namespace

double BoundaryData::sampled_max(int n) const
{
    return sampled_extreme(*this, n, std::greater<double>());
}

double BoundaryData::sampled_min(int n) const
{
    return sampled_extreme(*this, n, std::less<double>());
}

}  // namespace knt
