#include "knt/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "knt/error.hpp"

namespace knt
{
namespace
{
Rule1D compute_gauss(int n)
{
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k)
            {
                double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1)
            {
                p1 = z;
                p0 = 1;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // Recompute derivative at the converged node
        double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k)
        {
            double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        double w = 2 / ((1 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        r.x[n / 2] = 0;
    return r;
}
}  // namespace

Rule1D const& gauss_legendre(int n)
{
    if (n < 1)
        throw ArgumentError("gauss_legendre: n must be positive");
    static std::mutex m;
    static std::map<int, Rule1D> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(n);
    if (it == cache.end())
    {
        if (n == 1)
            it = cache.emplace(n, Rule1D{{0.0}, {2.0}}).first;
        else
            it = cache.emplace(n, compute_gauss(n)).first;
    }
    return it->second;
}

void append_gauss(Rule1D& out, double a, double b, int n)
{
    auto const& g = gauss_legendre(n);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i)
    {
        out.x.push_back(mid + half * g.x[i]);
        out.w.push_back(half * g.w[i]);
    }
}

Rule1D composite_gauss(std::vector<double> const& breaks, int n)
{
    Rule1D r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    {
        if (breaks[i + 1] > breaks[i])
            append_gauss(r, breaks[i], breaks[i + 1], n);
    }
    return r;
}

Rule1D gauss_exponential(double h, int n)
{
    if (!(h > 0) || n < 1)
        throw ArgumentError("gauss_exponential: need h > 0 and n >= 1");
    // Work in z = 2t/h - 1 so the recurrence stays well scaled.
    int m = std::max(48, 4 * n);
    auto const& g = gauss_legendre(m);
    std::vector<double> z(m), W(m);
    for (int i = 0; i < m; ++i)
    {
        z[i] = g.x[i];
        W[i] = 0.5 * h * g.w[i] * std::exp(-0.5 * h * (g.x[i] + 1));
    }
    std::vector<double> alpha(n), beta(n);
    std::vector<double> p_prev(m, 0.0), p(m, 1.0), p_next(m);
    double norm_prev = 1;
    for (int k = 0; k < n; ++k)
    {
        double norm = 0, first = 0;
        for (int i = 0; i < m; ++i)
        {
            norm += W[i] * p[i] * p[i];
            first += W[i] * z[i] * p[i] * p[i];
        }
        alpha[k] = first / norm;
        beta[k] = k == 0 ? norm : norm / norm_prev;
        for (int i = 0; i < m; ++i)
            p_next[i] = (z[i] - alpha[k]) * p[i]
                        - (k == 0 ? 0.0 : beta[k]) * p_prev[i];
        p_prev.swap(p);
        p.swap(p_next);
        norm_prev = norm;
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k)
    {
        J(k, k) = alpha[k];
        if (k + 1 < n)
            J(k, k + 1) = J(k + 1, k) = std::sqrt(beta[k + 1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    double mass = -std::expm1(-h);
    Rule1D r;
    double wsum = 0;
    for (int k = 0; k < n; ++k)
    {
        double v0 = es.eigenvectors()(0, k);
        r.x.push_back(0.5 * h * (es.eigenvalues()(k) + 1));
        r.w.push_back(v0 * v0);
        wsum += v0 * v0;
    }
    for (auto& w : r.w)
        w *= mass / wsum;
    return r;
}

double legendre_p(int l, double x)
{
    if (l == 0)
        return 1;
    double p0 = 1, p1 = x;
    for (int k = 2; k <= l; ++k)
    {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

}  // namespace knt
