#include "knt/albedo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "knt/elliptic.hpp"
#include "knt/error.hpp"
#include "knt/fit.hpp"
#include "knt/parallel.hpp"
#include "knt/quadrature.hpp"

namespace knt
{
namespace
{
void check_args(double kn, int n_b)
{
    if (!(kn > 0) || kn > 1)
        throw ArgumentError("albedo: Kn must lie in (0, 1]");
    if (n_b < 1)
        throw ArgumentError("albedo: basis size must be positive");
}

int degree_of_size(int n_b)
{
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_b)))) - 1;
}

std::vector<int> basis_degrees(int n_b)
{
    std::vector<int> deg(n_b);
    for (int k = 0; k < n_b; ++k)
        deg[k] = harmonic_mode(3, k).l;
    return deg;
}

// Per-degree radial profiles U_l for l = 0..L on one grid.
struct ModeProfiles
{
    RadialGrid grid;
    std::vector<Eigen::VectorXd> U;
    double residual{0};
};

ModeProfiles solve_profiles(AbsorptionField const& sigma, double kn, int L,
                            TransportOptions const& opts)
{
    if (!sigma.compactly_supported(1.0))
        throw DomainError("albedo: sigma_a support must lie inside the ball");
    ModeProfiles p;
    p.grid = make_radial_grid(kn, opts);
    for (int l = 0; l <= L; ++l)
    {
        ModeSolve ms = solve_mode_system(
            assemble_mode_system(l, kn, sigma, p.grid, opts), kn, opts);
        p.residual = std::max(p.residual, ms.residual);
        p.U.push_back(std::move(ms.U));
    }
    return p;
}

// Gauss in cos(theta) times uniform azimuths on the unit sphere.
struct SphereRule
{
    std::vector<Vec3> x;
    std::vector<double> w;
};

SphereRule sphere_rule(int n_polar, int n_azimuth)
{
    auto const& g = gauss_legendre(n_polar);
    SphereRule s;
    for (int i = 0; i < n_polar; ++i)
    {
        double ct = g.x[i], st = std::sqrt(std::max(0.0, 1 - ct * ct));
        for (int j = 0; j < n_azimuth; ++j)
        {
            double phi = 2 * std::numbers::pi * (j + 0.5) / n_azimuth;
            s.x.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
            s.w.push_back(g.w[i] * 2 * std::numbers::pi / n_azimuth);
        }
    }
    return s;
}

/*
 * (1/Kn) <(v . n) u_k> at boundary point n for every basis datum Y_k,
 * k < n_b. Rays are shared between columns. Backward orientation returns
 * the flux of the backward solution.
 */
Eigen::VectorXd boundary_fluxes(ModeProfiles const& p, Vec3 const& n,
                                double kn, AbsorptionField const& sigma,
                                int n_b, Orientation orientation,
                                TransportOptions const& opts)
{
    int L = degree_of_size(n_b);
    AngularQuadrature q = graded_quadrature_about(n, opts);
    std::vector<double> Y, Yn;
    real_sph_harm_all(L, n, Yn);
    bool forward = orientation == Orientation::forward;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_b);
    Eigen::VectorXd u(n_b);
    std::vector<double> U(L + 1);
    for (std::size_t a = 0; a < q.size(); ++a)
    {
        Vec3 const& v = q.nodes[a];
        double mu = v.dot(n);
        bool prescribed = forward ? mu < 0 : mu > 0;
        if (prescribed)
        {
            for (int k = 0; k < n_b; ++k)
                acc[k] += q.weights[a] * mu * Yn[k];
            continue;
        }
        Vec3 w = forward ? v : Vec3(-v);
        double s = exit_distance_unit(n, w);
        RayRule rule = make_ray_rule(n, w, s, kn, sigma, opts);
        real_sph_harm_all(L, (n - s * w).normalized(), Y);
        for (int k = 0; k < n_b; ++k)
            u[k] = rule.exit_weight * Y[k];
        for (std::size_t j = 0; j < rule.t.size(); ++j)
        {
            Vec3 eta = n - rule.t[j] * w;
            double rho = eta.norm();
            real_sph_harm_all(L, rho > 1e-14 ? Vec3(eta / rho) : Vec3::UnitZ(), Y);
            for (int l = 0; l <= L; ++l)
                U[l] = p.grid.interpolate(p.U[l], rho);
            for (int k = 0; k < n_b; ++k)
                u[k] += rule.w[j] * U[harmonic_mode(3, k).l] * Y[k];
        }
        acc += q.weights[a] * mu * u;
    }
    return acc / kn;
}

// Gradient of the solid harmonic sum g_k r^l Y_k by a five-point stencil.
Vec3 harmonic_extension_gradient(BoundaryData const& g, Vec3 const& x)
{
    auto value = [&](Vec3 const& y) {
        double r = y.norm();
        if (r < 1e-300)
            return g.coeffs()[0] * real_sph_harm(0, 0, Vec3::UnitZ());
        double acc = 0;
        Vec3 u = y / r;
        for (int k = 0; k < g.size(); ++k)
        {
            if (g.coeffs()[k] == 0)
                continue;
            auto hm = harmonic_mode(3, k);
            acc += g.coeffs()[k] * std::pow(r, hm.l) * real_sph_harm(hm.l, hm.m, u);
        }
        return acc;
    };
    double h = 1e-3;
    Vec3 grad;
    for (int a = 0; a < 3; ++a)
    {
        Vec3 e = Vec3::Zero();
        e[a] = h;
        grad[a] = (8 * (value(x + e) - value(x - e))
                   - (value(x + 2 * e) - value(x - 2 * e)))
                  / (12 * h);
    }
    return grad;
}

double harmonic_extension_value(BoundaryData const& g, Vec3 const& x)
{
    double r = x.norm();
    Vec3 u = r > 1e-14 ? Vec3(x / r) : Vec3(Vec3::UnitZ());
    double acc = 0;
    for (int k = 0; k < g.size(); ++k)
    {
        auto hm = harmonic_mode(3, k);
        acc += g.coeffs()[k] * std::pow(r, hm.l) * real_sph_harm(hm.l, hm.m, u);
    }
    return acc;
}

int boundary_polar(AlbedoOptions const& o, int L)
{
    return o.boundary_polar > 0 ? o.boundary_polar : L + 2;
}
int boundary_azimuth(AlbedoOptions const& o, int L)
{
    return o.boundary_azimuth > 0 ? o.boundary_azimuth : 2 * L + 4;
}
}  // namespace

//---------------------------------------------------------------------------//
AlbedoMatrix assemble_albedo(AbsorptionField const& sigma, double kn, int n_b,
                             AlbedoOptions const& opts,
                             Orientation orientation)
{
    check_args(kn, n_b);
    int L = degree_of_size(n_b);
    ModeProfiles p = solve_profiles(sigma, kn, L, opts.transport);
    SphereRule sr = sphere_rule(boundary_polar(opts, L), boundary_azimuth(opts, L));

    std::vector<Eigen::VectorXd> flux(sr.x.size());
    parallel_for(
        sr.x.size(),
        [&](std::size_t b) {
            flux[b] = boundary_fluxes(p, sr.x[b], kn, sigma, n_b, orientation,
                                      opts.transport);
        },
        opts.transport.threads);

    AlbedoMatrix A;
    A.kn = kn;
    A.sigma_descriptor = sigma.descriptor();
    A.route = orientation == Orientation::forward ? "projection"
                                                   : "projection-adjoint";
    A.degree = basis_degrees(n_b);
    A.solver_tol = opts.transport.tol;
    A.M = Eigen::MatrixXd::Zero(n_b, n_b);
    double sign = orientation == Orientation::forward ? 1.0 : -1.0;
    std::vector<double> Y;
    for (std::size_t b = 0; b < sr.x.size(); ++b)
    {
        real_sph_harm_all(L, sr.x[b], Y);
        for (int j = 0; j < n_b; ++j)
            A.M.row(j) += sign * sr.w[b] * Y[j] * flux[b].transpose();
    }
    if (!A.M.allFinite())
        throw NumericalError("assemble_albedo: non-finite entries", 0);
    return A;
}

std::vector<double> albedo_degree_values(AbsorptionField const& sigma,
                                         double kn, int L,
                                         TransportOptions const& opts)
{
    check_args(kn, 1);
    if (L < 0)
        throw ArgumentError("albedo_degree_values: negative degree");
    ModeProfiles p = solve_profiles(sigma, kn, L, opts);
    // Zonal data P_l at the pole; outgoing rays leave the pole with cosine mu.
    Vec3 n = Vec3::UnitZ();
    std::vector<double> br = graded_polar_breaks();
    br.erase(br.begin(), std::find(br.begin(), br.end(), 0.0));
    Rule1D mu = composite_gauss(br, opts.mu_per_panel);
    std::vector<double> out(L + 1, 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i)
    {
        double m = mu.x[i], st = std::sqrt(std::max(0.0, 1 - m * m));
        Vec3 v(st, 0, m);
        double s = 2 * m;
        RayRule rule = make_ray_rule(n, v, s, kn, sigma, opts);
        double c_exit = 1 - 2 * m * m;
        for (int l = 0; l <= L; ++l)
        {
            double u = rule.exit_weight * legendre_p(l, c_exit);
            for (std::size_t j = 0; j < rule.t.size(); ++j)
            {
                Vec3 eta = n - rule.t[j] * v;
                double rho = eta.norm();
                double c = rho > 1e-14 ? eta.z() / rho : 1.0;
                u += rule.w[j] * p.grid.interpolate(p.U[l], rho) * legendre_p(l, c);
            }
            out[l] += 0.5 * mu.w[i] * m * u;
        }
    }
    for (double& v : out)
        v = (v - 0.25) / kn;
    return out;
}

AlbedoMatrix assemble_albedo_modal(AbsorptionField const& sigma, double kn,
                                   int n_b, TransportOptions const& opts)
{
    check_args(kn, n_b);
    auto vals = albedo_degree_values(sigma, kn, degree_of_size(n_b), opts);
    AlbedoMatrix A;
    A.kn = kn;
    A.sigma_descriptor = sigma.descriptor();
    A.route = "per-degree";
    A.degree = basis_degrees(n_b);
    A.solver_tol = opts.tol;
    A.M = Eigen::MatrixXd::Zero(n_b, n_b);
    for (int k = 0; k < n_b; ++k)
        A.M(k, k) = vals[A.degree[k]];
    return A;
}

double operator_norm(Eigen::MatrixXd const& A, std::vector<int> const& degree,
                     double s)
{
    if (s < 0)
        throw ArgumentError("operator_norm: s must be nonnegative");
    if (A.rows() != A.cols() || static_cast<int>(degree.size()) != A.rows())
        throw ArgumentError("operator_norm: shape mismatch");
    if (A.size() == 0)
        return 0;
    Eigen::VectorXd w(A.rows());
    for (int k = 0; k < A.rows(); ++k)
        w[k] = std::pow(1 + harmonic_eigenvalue(3, degree[k]), -s / 2);
    Eigen::MatrixXd B = w.asDiagonal() * A * w.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    return svd.singularValues()[0];
}

BoundaryData apply_albedo(AlbedoMatrix const& A, BoundaryData const& f)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(A.size());
    int n = std::min(A.size(), f.size());
    c.head(n) = f.coeffs().head(n);
    if (f.size() > A.size() && f.coeffs().tail(f.size() - A.size()).any())
        throw ArgumentError("apply_albedo: datum outside the basis span");
    return BoundaryData(3, A.M * c);
}

//---------------------------------------------------------------------------//
IdentityReport weak_form_check(AbsorptionField const& sigma, double kn,
                               BoundaryData const& f, BoundaryData const& g,
                               int level, AlbedoOptions const& opts)
{
    if (level < 1)
        throw ArgumentError("weak_form_check: level must be >= 1");
    int L = std::max(f.max_degree(), g.max_degree());
    int n_b = harmonic_count(3, L);
    auto pad = [&](BoundaryData const& b) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n_b);
        c.head(b.size()) = b.coeffs();
        return c;
    };
    Eigen::VectorXd fc = pad(f), gc = pad(g);

    IdentityReport rep;
    auto vals = albedo_degree_values(sigma, kn, L, opts.transport);
    for (int k = 0; k < n_b; ++k)
        rep.lhs += gc[k] * vals[harmonic_mode(3, k).l] * fc[k];

    TransportSolution sol = solve_mean_intensity(BoundaryData(3, fc), kn, sigma,
                                                 {}, opts.transport);
    // Radial panels graded toward the boundary in units of Kn.
    std::vector<double> br{0.0};
    if (!sigma.is_zero())
        br.push_back(sigma.r_support());
    for (double c : {8.0, 4.0, 2.0, 1.0, 0.5, 0.2})
        if (1 - c * kn > 0)
            br.push_back(1 - c * kn);
    br.push_back(1.0);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(),
                         [](double a, double b) { return b - a < 1e-12; }),
             br.end());
    std::vector<double> fine;
    int split = 1 << (level - 1);
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
        for (int j = 0; j < split; ++j)
            fine.push_back(br[i] + (br[i + 1] - br[i]) * j / split);
    fine.push_back(1.0);
    Rule1D rad = composite_gauss(fine, 3);
    SphereRule ang = sphere_rule(L + 2, 2 * L + 4);

    std::size_t n_pts = rad.size() * ang.x.size();
    std::vector<double> t_abs(n_pts, 0.0), t_flux(n_pts, 0.0);
    BoundaryData gd(3, gc);
    parallel_for(
        n_pts,
        [&](std::size_t i) {
            std::size_t ir = i / ang.x.size(), ia = i % ang.x.size();
            double r = rad.x[ir];
            Vec3 x = r * ang.x[ia];
            double w = rad.w[ir] * r * r * ang.w[ia];
            AngularMoments m = reconstruct_moments(sol, x);
            double sa = sigma(r);
            if (sa != 0)
                t_abs[i] = -w * sa * sol.mean(x) * harmonic_extension_value(gd, x);
            t_flux[i] = w / kn * m.flux.dot(harmonic_extension_gradient(gd, x));
        },
        opts.transport.threads);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < n_pts; ++i)
    {
        a += t_abs[i];
        b += t_flux[i];
    }
    rep.rhs = a + b;
    rep.scale = std::max({std::abs(rep.lhs), std::abs(a), std::abs(b)});
    rep.residual = rep.scale > 0 ? std::abs(rep.lhs - rep.rhs) / rep.scale : 0;
    return rep;
}

IdentityReport adjoint_check(AbsorptionField const& sigma, double kn,
                             BoundaryData const& f, BoundaryData const& g,
                             AlbedoOptions const& opts)
{
    check_args(kn, 1);
    int L = std::max(f.max_degree(), g.max_degree());
    TransportSolution fw = solve_mean_intensity(f, kn, sigma, {}, opts.transport);
    TransportSolution bw = solve_mean_intensity(
        g, kn, sigma, {}, opts.transport, Orientation::backward);
    SphereRule sr = sphere_rule(boundary_polar(opts, L), boundary_azimuth(opts, L));
    std::vector<double> pf(sr.x.size()), pb(sr.x.size());
    parallel_for(
        sr.x.size(),
        [&](std::size_t i) {
            pf[i] = sr.w[i] * boundary_flux(fw, sr.x[i]) * g(sr.x[i]);
            pb[i] = -sr.w[i] * boundary_flux(bw, sr.x[i]) * f(sr.x[i]);
        },
        opts.transport.threads);
    IdentityReport rep;
    for (std::size_t i = 0; i < sr.x.size(); ++i)
    {
        rep.lhs += pf[i];
        rep.rhs += pb[i];
    }
    rep.scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
    rep.residual = rep.scale > 0 ? std::abs(rep.lhs - rep.rhs) / rep.scale : 0;
    return rep;
}

//---------------------------------------------------------------------------//
AprioriSweep albedo_apriori_sweep(AbsorptionField const& sigma,
                                  BoundaryData const& f,
                                  std::vector<double> const& kn_list, int s0,
                                  double s1, TransportOptions const& opts)
{
    if (kn_list.empty())
        throw ArgumentError("albedo_apriori_sweep: empty Kn list");
    int L = f.max_degree();
    double r_K = sigma.is_zero() ? 0.5 : sigma.r_support();
    ExpansionFields e = expansion_fields(f, AbsorptionField());
    double rho_norm = interior_sobolev_norm(e.rho00, r_K, s0);
    double f_norm = f.hs_norm(s1);

    AprioriSweep out;
    double cmin = 0, cmax = 0;
    for (double kn : kn_list)
    {
        auto vs = albedo_degree_values(sigma, kn, L, opts);
        auto v0 = albedo_degree_values(AbsorptionField(), kn, L, opts);
        Eigen::VectorXd d(f.size());
        for (int k = 0; k < f.size(); ++k)
        {
            int l = harmonic_mode(3, k).l;
            d[k] = (vs[l] - v0[l]) * f.coeffs()[k];
        }
        AprioriRow row;
        row.kn = kn;
        row.lhs = BoundaryData(3, d).hs_norm(-0.5);
        row.rho_norm = rho_norm;
        row.f_norm = f_norm;
        row.rhs = rho_norm + kn * f_norm;
        row.C = row.rhs > 0 ? row.lhs / row.rhs : 0;
        if (out.rows.empty())
            cmin = cmax = row.C;
        cmin = std::min(cmin, row.C);
        cmax = std::max(cmax, row.C);
        out.rows.push_back(row);
    }
    out.spread = cmin > 0 ? cmax / cmin : (cmax > 0 ? INFINITY : 1.0);
    return out;
}

std::vector<DtnRow> dtn_limit_study(AbsorptionField const& sigma,
                                    std::vector<double> const& kn_list, int L,
                                    TransportOptions const& opts)
{
    std::vector<double> dtn(L + 1);
    for (int l = 0; l <= L; ++l)
        dtn[l] = dtn_mode(l, sigma) - dtn_mode(l, AbsorptionField());
    std::vector<DtnRow> rows;
    for (double kn : kn_list)
    {
        auto vs = albedo_degree_values(sigma, kn, L, opts);
        auto v0 = albedo_degree_values(AbsorptionField(), kn, L, opts);
        for (int l = 0; l <= L; ++l)
        {
            DtnRow r;
            r.kn = kn;
            r.l = l;
            r.albedo_diff = vs[l] - v0[l];
            r.dtn_diff = dtn[l];
            r.ratio = dtn[l] != 0 ? r.albedo_diff / dtn[l] : 0;
            rows.push_back(r);
        }
    }
    return rows;
}

DtnFit fit_dtn_limit(std::vector<DtnRow> const& rows)
{
    std::map<int, std::map<double, double>> by_l;
    for (auto const& r : rows)
        by_l[r.l][r.kn] = r.ratio;
    if (by_l.empty() || by_l.begin()->first != 0 || by_l[0].size() < 2)
        throw ArgumentError("fit_dtn_limit: need degree 0 at two or more Kn");
    auto it = by_l[0].begin();
    auto [k1, q1] = *it++;
    auto [k2, q2] = *it;
    DtnFit fit;
    fit.normalization = q1 - k1 * (q2 - q1) / (k2 - k1);
    for (auto const& [l, m] : by_l)
    {
        std::vector<double> x, y;
        for (auto const& [kn, q] : m)
        {
            x.push_back(std::log(kn));
            y.push_back(std::log(std::abs(q - fit.normalization)));
        }
        fit.rate.push_back(x.size() >= 2 ? least_squares_slope(x, y) : 0.0);
    }
    return fit;
}

}  // namespace knt
