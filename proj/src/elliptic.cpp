#include "knt/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "knt/error.hpp"
#include "knt/quadrature.hpp"

namespace knt
{
namespace
{
// Conservative scheme for -C r^{1-D} (r^{D-1} q')' + sigma q = s_q on n cells.
std::vector<double> solve_fv(int n, int D, double C, std::vector<double> const& sig,
                             std::vector<double> const& src, double g)
{
    double h = 1.0 / n;
    std::vector<double> lower(n + 1, 0), diag(n + 1, 0), upper(n + 1, 0),
        rhs(n + 1, 0);
    auto face = [&](double rf) { return C * std::pow(rf, D - 1) / h; };
    for (int i = 0; i < n; ++i)
    {
        double r0 = i == 0 ? 0.0 : (i - 0.5) * h;
        double r1 = (i + 0.5) * h;
        double vol = (std::pow(r1, D) - std::pow(r0, D)) / D;
        double fr = face(r1);
        double fl = i == 0 ? 0.0 : face(r0);
        diag[i] = fr + fl + sig[i] * vol;
        upper[i] = -fr;
        lower[i] = -fl;
        rhs[i] = src[i] * vol;
    }
    diag[n] = 1;
    rhs[n] = g;
    // Thomas algorithm.
    for (int i = 1; i <= n; ++i)
    {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> q(n + 1);
    q[n] = rhs[n] / diag[n];
    for (int i = n - 1; i >= 0; --i)
        q[i] = (rhs[i] - upper[i] * q[i + 1]) / diag[i];
    return q;
}

// Source in q form at r; the origin uses cubic extrapolation from r > 0.
std::vector<double> q_source(std::function<double(double)> const& source, int l,
                             int n)
{
    std::vector<double> s(n + 1, 0.0);
    if (!source)
        return s;
    double h = 1.0 / n;
    for (int i = 1; i <= n; ++i)
    {
        double r = i * h;
        s[i] = source(r) / std::pow(r, l);
    }
    if (l == 0)
        s[0] = source(0.0);
    else
        s[0] = 4 * s[1] - 6 * s[2] + 4 * s[3] - s[4];
    return s;
}

double hermite(double x0, double x1, double f0, double f1, double d0, double d1,
               double x, double* deriv)
{
    double h = x1 - x0, t = (x - x0) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    if (deriv)
    {
        double g00 = 6 * t2 - 6 * t, g10 = 3 * t2 - 4 * t + 1;
        double g01 = -6 * t2 + 6 * t, g11 = 3 * t2 - 2 * t;
        *deriv = (g00 * f0 + g01 * f1) / h + g10 * d0 + g11 * d1;
    }
    return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
}

// Fourth-order first derivative at node i of an even profile on [0, 1].
double d1_node(std::vector<double> const& q, int i, double h)
{
    int n = static_cast<int>(q.size()) - 1;
    auto at = [&](int j) { return q[std::abs(j)]; };
    if (i + 2 <= n)
        return (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) / (12 * h);
    if (i == n)
        return (25 * q[n] - 48 * q[n - 1] + 36 * q[n - 2] - 16 * q[n - 3]
                + 3 * q[n - 4])
               / (12 * h);
    // i = n - 1
    return (3 * q[n] + 10 * q[n - 1] - 18 * q[n - 2] + 6 * q[n - 3] - q[n - 4])
           / (12 * h);
}

// Fourth-order second derivative at node i.
double d2_node(std::vector<double> const& q, int i, double h)
{
    int n = static_cast<int>(q.size()) - 1;
    auto at = [&](int j) { return q[std::abs(j)]; };
    if (i + 2 <= n)
        return (-at(i + 2) + 16 * at(i + 1) - 30 * at(i) + 16 * at(i - 1)
                - at(i - 2))
               / (12 * h * h);
    return (10 * q[n] - 15 * q[n - 1] - 4 * q[n - 2] + 14 * q[n - 3]
            - 6 * q[n - 4] + q[n - 5])
           / (12 * h * h);
}

double solid_harmonic(int l, int k, Vec3 const& x, std::vector<double>& Y)
{
    double r = x.norm();
    if (r == 0)
        return l == 0 ? 0.5 / std::sqrt(std::numbers::pi) : 0.0;
    real_sph_harm_all(l, x / r, Y);
    return std::pow(r, l) * Y[k];
}
}  // namespace

//---------------------------------------------------------------------------//
double RadialModeSolution::q_at(double rho) const
{
    int n = static_cast<int>(r.size()) - 1;
    rho = std::clamp(rho, 0.0, 1.0);
    int i = std::min(n - 1, static_cast<int>(rho * n));
    return hermite(r[i], r[i + 1], q[i], q[i + 1], dq[i], dq[i + 1], rho,
                   nullptr);
}

double RadialModeSolution::dq_at(double rho) const
{
    int n = static_cast<int>(r.size()) - 1;
    rho = std::clamp(rho, 0.0, 1.0);
    int i = std::min(n - 1, static_cast<int>(rho * n));
    double d;
    hermite(r[i], r[i + 1], q[i], q[i + 1], dq[i], dq[i + 1], rho, &d);
    return d;
}

double RadialModeSolution::value(double rho) const
{
    return std::pow(rho, l) * q_at(rho);
}

double RadialModeSolution::derivative(double rho) const
{
    double base = std::pow(rho, l) * dq_at(rho);
    if (l > 0)
        base += l * std::pow(rho, l - 1) * q_at(rho);
    return base;
}

double RadialModeSolution::boundary_derivative() const
{
    return l * q.back() + dq.back();
}

RadialModeSolution solve_mode(int l, AbsorptionField const& sigma, double g,
                              std::function<double(double)> const& source,
                              EllipticOptions const& opts)
{
    if (l < 0)
        throw ArgumentError("solve_mode: negative degree");
    if (opts.n < 16)
        throw ArgumentError("solve_mode: need at least 16 cells");
    if (opts.d != 2 && opts.d != 3)
        throw ArgumentError("solve_mode: dimension must be 2 or 3");
    int D = 2 * l + opts.d;
    double C = diffusion_coefficient(opts.d);
    auto run = [&](int n) {
        std::vector<double> sig(n + 1);
        for (int i = 0; i <= n; ++i)
            sig[i] = sigma(static_cast<double>(i) / n);
        return solve_fv(n, D, C, sig, q_source(source, l, n), g);
    };
    int n = opts.n;
    auto coarse = run(n);
    auto fine = run(2 * n);
    RadialModeSolution sol;
    sol.l = l;
    sol.d = opts.d;
    sol.r.resize(n + 1);
    sol.q.resize(n + 1);
    sol.dq.resize(n + 1);
    for (int i = 0; i <= n; ++i)
    {
        sol.r[i] = static_cast<double>(i) / n;
        sol.q[i] = (4 * fine[2 * i] - coarse[i]) / 3;
    }
    sol.r[n] = 1.0;
    for (int i = 0; i <= n; ++i)
        sol.dq[i] = i == 0 ? 0.0 : d1_node(sol.q, i, 1.0 / n);
    return sol;
}

double dtn_mode(int l, AbsorptionField const& sigma, EllipticOptions const& opts)
{
    return solve_mode(l, sigma, 1.0, {}, opts).boundary_derivative();
}

double mode_residual(RadialModeSolution const& sol, AbsorptionField const& sigma,
                     std::function<double(double)> const& source)
{
    int n = static_cast<int>(sol.r.size()) - 1;
    double h = 1.0 / n;
    int D = 2 * sol.l + sol.d;
    double C = diffusion_coefficient(sol.d);
    auto sq = q_source(source, sol.l, n);
    double worst = 0, scale = 0;
    for (int i = 1; i < n; ++i)
    {
        double lap = d2_node(sol.q, i, h) + (D - 1) / sol.r[i] * d1_node(sol.q, i, h);
        double sq_i = sigma(sol.r[i]) * sol.q[i];
        worst = std::max(worst, std::abs(-C * lap + sq_i - sq[i]));
        scale = std::max(scale, std::abs(C * lap) + std::abs(sq_i) + std::abs(sq[i]));
    }
    return scale > 0 ? worst / scale : worst;
}

//---------------------------------------------------------------------------//
int ModalField::max_degree() const
{
    return coeffs.size() == 0 ? 0 : harmonic_mode(d, coeffs.size() - 1).l;
}

double ModalField::value(Vec3 const& x) const
{
    thread_local std::vector<double> Y;
    double r = x.norm();
    int L = max_degree();
    real_sph_harm_all(L, r > 0 ? Vec3(x / r) : Vec3(Vec3::UnitZ()), Y);
    double acc = 0;
    for (auto const& [l, p] : profiles)
    {
        if (l > L)
            continue;
        double radial = p.value(r);
        if (radial == 0)
            continue;
        for (int k = harmonic_index(d, l, -l); k <= harmonic_index(d, l, l); ++k)
            acc += coeffs[k] * radial * Y[k];
    }
    return acc;
}

Vec3 ModalField::gradient(Vec3 const& x) const
{
    thread_local std::vector<double> Y;
    double r = x.norm();
    Vec3 unit = r > 0 ? Vec3(x / r) : Vec3::Zero();
    Vec3 g = Vec3::Zero();
    double const h = 1e-3;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    {
        if (coeffs[k] == 0)
            continue;
        int l = harmonic_mode(d, k).l;
        auto it = profiles.find(l);
        if (it == profiles.end())
            continue;
        auto const& p = it->second;
        double H = solid_harmonic(l, k, x, Y);
        // Solid harmonics are polynomials of degree l; five-point differences
        // are exact through degree 4.
        Vec3 dH;
        for (int a = 0; a < 3; ++a)
        {
            Vec3 e = Vec3::Zero();
            e[a] = h;
            dH[a] = (-solid_harmonic(l, k, x + 2 * e, Y)
                     + 8 * solid_harmonic(l, k, x + e, Y)
                     - 8 * solid_harmonic(l, k, x - e, Y)
                     + solid_harmonic(l, k, x - 2 * e, Y))
                    / (12 * h);
        }
        g += coeffs[k] * (p.dq_at(r) * H * unit + p.q_at(r) * dH);
    }
    return g;
}

BoundaryData ModalField::normal_derivative() const
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    {
        auto it = profiles.find(harmonic_mode(d, k).l);
        if (it != profiles.end())
            c[k] = coeffs[k] * it->second.boundary_derivative();
    }
    return BoundaryData(d, c);
}

BoundaryData ModalField::trace() const
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    {
        auto it = profiles.find(harmonic_mode(d, k).l);
        if (it != profiles.end())
            c[k] = coeffs[k] * it->second.q.back();
    }
    return BoundaryData(d, c);
}

//---------------------------------------------------------------------------//
ExpansionFields expansion_fields(BoundaryData const& f,
                                 AbsorptionField const& sigma, double ratio,
                                 EllipticOptions const& opts)
{
    if (f.dim() != 3 || opts.d != 3)
        throw UnsupportedError("expansion_fields: only d = 3 is supported");
    ExpansionFields e;
    e.ratio = ratio;
    AbsorptionField zero;
    for (ModalField* m : {&e.rho00, &e.rhoa0, &e.psi0, &e.c0, &e.c, &e.ca})
    {
        m->d = opts.d;
        m->coeffs = f.coeffs();
    }
    for (int l : f.degrees())
    {
        auto rho00 = solve_mode(l, zero, 1.0, {}, opts);
        auto rhoa0 = solve_mode(l, sigma, 1.0, {}, opts);
        auto psi_src = [&](double r) { return -sigma(r) * std::pow(r, l); };
        auto psi0 = solve_mode(l, sigma, 0.0, psi_src, opts);
        double c0_value = -ratio * rho00.boundary_derivative();
        auto c0 = solve_mode(l, zero, c0_value, {}, opts);
        auto c_src = [&](double r) { return -sigma(r) * c0_value * std::pow(r, l); };
        auto c = solve_mode(l, sigma, -ratio * psi0.boundary_derivative(), c_src,
                            opts);
        auto ca = solve_mode(l, sigma, -ratio * rhoa0.boundary_derivative(), {},
                             opts);
        e.rho00.profiles.emplace(l, std::move(rho00));
        e.rhoa0.profiles.emplace(l, std::move(rhoa0));
        e.psi0.profiles.emplace(l, std::move(psi0));
        e.c0.profiles.emplace(l, std::move(c0));
        e.c.profiles.emplace(l, std::move(c));
        e.ca.profiles.emplace(l, std::move(ca));
    }
    return e;
}

double ca_consistency(ExpansionFields const& e)
{
    double worst = 0, scale = 0;
    for (auto const& [l, ca] : e.ca.profiles)
    {
        auto const& c = e.c.profiles.at(l);
        auto const& c0 = e.c0.profiles.at(l);
        for (std::size_t i = 0; i < ca.q.size(); ++i)
        {
            worst = std::max(worst, std::abs(c.q[i] + c0.q[i] - ca.q[i]));
            scale = std::max(scale, std::abs(ca.q[i]));
        }
    }
    return scale > 0 ? worst / scale : worst;
}

//---------------------------------------------------------------------------//
namespace
{
// Central stencil weights for the k-th derivative on offsets -p..p.
std::vector<double> central_weights(int k)
{
    int p = (k + 1) / 2;
    if (k == 0)
        return {1.0};
    int m = 2 * p + 1;
    Eigen::MatrixXd V(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int row = 0; row < m; ++row)
        for (int j = 0; j < m; ++j)
            V(row, j) = std::pow(static_cast<double>(j - p), row);
    double fact = 1;
    for (int i = 2; i <= k; ++i)
        fact *= i;
    rhs[k] = fact;
    Eigen::VectorXd w = V.fullPivLu().solve(rhs);
    return std::vector<double>(w.data(), w.data() + m);
}

double sobolev_sq(ModalField const& F, double rK, int m, double h)
{
    std::array<std::vector<double>, 7> W;
    for (int k = 0; k <= m; ++k)
        W[k] = central_weights(k);
    int P = (m + 1) / 2;
    int S = 2 * P + 1;
    // Product Gauss rule on the ball: radial, polar, azimuthal.
    auto const& gr = gauss_legendre(10);
    auto const& gm = gauss_legendre(10);
    int n_az = 20;
    double total = 0;
    std::vector<double> cube(S * S * S);
    for (int ir = 0; ir < 10; ++ir)
    {
        double r = 0.5 * rK * (gr.x[ir] + 1);
        double wr = 0.5 * rK * gr.w[ir] * r * r;
        for (int im = 0; im < 10; ++im)
        {
            double mu = gm.x[im], st = std::sqrt(1 - mu * mu);
            for (int ia = 0; ia < n_az; ++ia)
            {
                double ph = 2 * std::numbers::pi * (ia + 0.5) / n_az;
                double w = wr * gm.w[im] * 2 * std::numbers::pi / n_az;
                Vec3 x(r * st * std::cos(ph), r * st * std::sin(ph), r * mu);
                for (int a = 0; a < S; ++a)
                    for (int b = 0; b < S; ++b)
                        for (int c = 0; c < S; ++c)
                            cube[(a * S + b) * S + c] = F.value(
                                x + h * Vec3(a - P, b - P, c - P));
                for (int ax = 0; ax <= m; ++ax)
                    for (int bx = 0; ax + bx <= m; ++bx)
                        for (int cx = 0; ax + bx + cx <= m; ++cx)
                        {
                            int pa = (ax + 1) / 2, pb = (bx + 1) / 2, pc = (cx + 1) / 2;
                            double d = 0;
                            for (int a = -pa; a <= pa; ++a)
                                for (int b = -pb; b <= pb; ++b)
                                    for (int c = -pc; c <= pc; ++c)
                                        d += W[ax][a + pa] * W[bx][b + pb]
                                             * W[cx][c + pc]
                                             * cube[((a + P) * S + (b + P)) * S + c + P];
                            d /= std::pow(h, ax + bx + cx);
                            total += w * d * d;
                        }
            }
        }
    }
    return total;
}
}  // namespace

double interior_sobolev_norm(ModalField const& field, double r_K, int m)
{
    if (m < 0 || m > 6)
        throw ArgumentError("interior_sobolev_norm: order must lie in [0, 6]");
    if (!(r_K > 0) || r_K + 0.15 > 1)
        throw ArgumentError("interior_sobolev_norm: need 0 < r_K <= 0.85");
    if (m == 0)
        return std::sqrt(sobolev_sq(field, r_K, 0, 1.0));
    double h = 0.04;
    double a = sobolev_sq(field, r_K, m, h);
    double b = sobolev_sq(field, r_K, m, h / 2);
    return std::sqrt(std::max(0.0, (4 * b - a) / 3));
}

}  // namespace knt
