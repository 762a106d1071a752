#include "knt/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "knt/error.hpp"
#include "knt/parallel.hpp"
#include "knt/quadrature.hpp"

namespace knt
{
namespace
{
// Optical-depth panel breaks in units of Kn; rays are cut at the last one.
constexpr double kTauBreaks[] = {0,   0.25, 0.5, 1,  1.5, 2,  3,  4,  5,
                                 6.5, 8,    10,  13, 16,  20, 25, 32, 40};
constexpr int kTauPanels = sizeof(kTauBreaks) / sizeof(double) - 1;
constexpr double kSigmaPiece = 0.02;

std::vector<Rule1D> const& full_panel_rules(int n)
{
    static std::mutex m;
    static std::map<int, std::vector<Rule1D>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(n);
    if (it == cache.end())
    {
        std::vector<Rule1D> rules;
        for (int k = 0; k < kTauPanels; ++k)
            rules.push_back(
                gauss_exponential(kTauBreaks[k + 1] - kTauBreaks[k], n));
        it = cache.emplace(n, std::move(rules)).first;
    }
    return it->second;
}

// Parameter interval [a, b] where x - t v lies inside the support sphere.
bool support_chord(Vec3 const& x, Vec3 const& v, double r_support, double& a,
                   double& b)
{
    double xv = x.dot(v);
    double disc = xv * xv - x.squaredNorm() + r_support * r_support;
    if (disc <= 0)
        return false;
    double root = std::sqrt(disc);
    a = std::max(0.0, xv - root);
    b = xv + root;
    return b > a;
}

double sigma_piece(AbsorptionField const& sigma, Vec3 const& x, Vec3 const& v,
                   double a, double b)
{
    if (b <= a)
        return 0;
    auto const& g = gauss_legendre(4);
    int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / kSigmaPiece)));
    double h = (b - a) / pieces, acc = 0;
    for (int p = 0; p < pieces; ++p)
    {
        double mid = a + (p + 0.5) * h;
        for (int i = 0; i < 4; ++i)
        {
            double t = mid + 0.5 * h * g.x[i];
            acc += 0.5 * h * g.w[i] * sigma((x - t * v).norm());
        }
    }
    return acc;
}

Vec3 axis_of(Vec3 const& x)
{
    double n = x.norm();
    return n > 1e-14 ? Vec3(x / n) : Vec3(Vec3::UnitZ());
}

// Visits every (point, weight) of the ray quadrature of int_D E(x, .) g.
template<class F>
void for_each_kernel_node(Vec3 const& x, double kn,
                          AbsorptionField const& sigma,
                          TransportOptions const& opts, F&& visit)
{
    AngularQuadrature q = graded_quadrature_about(axis_of(x), opts);
    for (std::size_t a = 0; a < q.size(); ++a)
    {
        Vec3 const& v = q.nodes[a];
        double s = exit_distance_unit(x, v);
        RayRule rule = make_ray_rule(x, v, s, kn, sigma, opts);
        for (std::size_t k = 0; k < rule.t.size(); ++k)
            visit(Vec3(x - rule.t[k] * v), q.weights[a] * rule.w[k]);
    }
}

void check_kn(double kn)
{
    if (!(kn > 0) || kn > 1)
        throw ArgumentError("transport: Kn must lie in (0, 1]");
}
}  // namespace

//---------------------------------------------------------------------------//
void RadialGrid::locate(double rho, std::size_t& j, double& s) const
{
    rho = std::clamp(rho, 0.0, r.back());
    auto it = std::upper_bound(r.begin(), r.end(), rho);
    std::size_t hi = static_cast<std::size_t>(it - r.begin());
    hi = std::clamp<std::size_t>(hi, 1, r.size() - 1);
    j = hi - 1;
    s = (rho - r[j]) / (r[hi] - r[j]);
}

void RadialGrid::stencil(double rho, std::size_t& first,
                         std::array<double, 4>& w) const
{
    std::size_t j;
    double s;
    locate(rho, j, s);
    rho = std::clamp(rho, 0.0, r.back());
    std::size_t n = r.size();
    first = j == 0 ? 0 : std::min(j - 1, n - 4);
    for (int a = 0; a < 4; ++a)
    {
        double acc = 1;
        for (int b = 0; b < 4; ++b)
            if (b != a)
                acc *= (rho - r[first + b]) / (r[first + a] - r[first + b]);
        w[a] = acc;
    }
}

double RadialGrid::interpolate(Eigen::VectorXd const& values, double rho) const
{
    std::size_t first;
    std::array<double, 4> w;
    stencil(rho, first, w);
    return w[0] * values[first] + w[1] * values[first + 1]
           + w[2] * values[first + 2] + w[3] * values[first + 3];
}

RadialGrid make_radial_grid(double kn, TransportOptions const& opts)
{
    check_kn(kn);
    if (opts.n_bulk < 4 || !(opts.growth > 1) || !(opts.first_cell > 0))
        throw ArgumentError("make_radial_grid: invalid grading controls");
    double h_bulk = 1.0 / opts.n_bulk;
    double h = std::min(opts.first_cell * kn, h_bulk);
    std::vector<double> depth{0.0};
    while (depth.back() + h < 1)
    {
        depth.push_back(depth.back() + h);
        if (h >= h_bulk)
            break;
        h *= opts.growth;
        if (depth.back() < 5 * kn)
            h = std::min(h, 0.5 * kn);
        h = std::min(h, h_bulk);
    }
    double rest = 1 - depth.back();
    int m = std::max(1, static_cast<int>(std::ceil(rest / h_bulk - 1e-9)));
    double base = depth.back();
    for (int i = 1; i <= m; ++i)
        depth.push_back(i == m ? 1.0 : base + rest * i / m);
    RadialGrid g;
    for (auto it = depth.rbegin(); it != depth.rend(); ++it)
        g.r.push_back(1 - *it);
    g.r.front() = 0;
    return g;
}

//---------------------------------------------------------------------------//
double SpatialMesh::total_volume() const
{
    double s = 0;
    for (double v : volumes)
        s += v;
    return s;
}

SpatialMesh make_spatial_mesh(std::vector<double> r_edges, int n_theta,
                              int n_phi, int d)
{
    if (r_edges.size() < 2 || !std::is_sorted(r_edges.begin(), r_edges.end())
        || n_phi < 1 || (d == 3 && n_theta < 1) || (d != 2 && d != 3))
        throw ArgumentError("make_spatial_mesh: invalid mesh description");
    SpatialMesh m;
    m.d = d;
    m.r_edges = std::move(r_edges);
    m.n_theta = d == 3 ? n_theta : 1;
    m.n_phi = n_phi;
    double const pi = std::numbers::pi;
    double dphi = 2 * pi / n_phi;
    for (std::size_t i = 0; i + 1 < m.r_edges.size(); ++i)
    {
        double r0 = m.r_edges[i], r1 = m.r_edges[i + 1], rc = 0.5 * (r0 + r1);
        for (int it = 0; it < m.n_theta; ++it)
        {
            double th0 = pi * it / m.n_theta, th1 = pi * (it + 1) / m.n_theta;
            double thc = 0.5 * (th0 + th1);
            for (int ip = 0; ip < n_phi; ++ip)
            {
                double ph = dphi * (ip + 0.5);
                if (d == 3)
                {
                    m.centers.emplace_back(rc * std::sin(thc) * std::cos(ph),
                                           rc * std::sin(thc) * std::sin(ph),
                                           rc * std::cos(thc));
                    m.volumes.push_back((r1 * r1 * r1 - r0 * r0 * r0) / 3
                                        * (std::cos(th0) - std::cos(th1))
                                        * dphi);
                }
                else
                {
                    m.centers.emplace_back(rc * std::cos(ph),
                                           rc * std::sin(ph), 0.0);
                    m.volumes.push_back(0.5 * (r1 * r1 - r0 * r0) * dphi);
                }
            }
        }
    }
    return m;
}

//---------------------------------------------------------------------------//
std::vector<double> graded_polar_breaks()
{
    static double const pos[] = {0.005, 0.01, 0.02, 0.05, 0.1,
                                 0.2,   0.35, 0.5,  0.7,  1.0};
    std::vector<double> b;
    for (int i = 9; i >= 0; --i)
        b.push_back(-pos[i]);
    b.push_back(0.0);
    for (double p : pos)
        b.push_back(p);
    return b;
}

AngularQuadrature graded_quadrature_about(Vec3 const& axis,
                                          TransportOptions const& opts)
{
    if (opts.mu_per_panel < 1 || opts.n_azimuth < 4)
        throw ArgumentError("graded_quadrature_about: invalid angular counts");
    Rule1D mu = composite_gauss(graded_polar_breaks(), opts.mu_per_panel);
    Vec3 e1, e2;
    orthonormal_frame(axis, e1, e2);
    AngularQuadrature q;
    q.d = 3;
    q.n_polar = static_cast<int>(mu.size());
    q.n_azimuth = opts.n_azimuth;
    for (std::size_t i = 0; i < mu.size(); ++i)
    {
        double st = std::sqrt(std::max(0.0, 1 - mu.x[i] * mu.x[i]));
        for (int j = 0; j < opts.n_azimuth; ++j)
        {
            double phi = 2 * std::numbers::pi * (j + 0.5) / opts.n_azimuth;
            q.nodes.push_back(mu.x[i] * axis
                              + st * (std::cos(phi) * e1 + std::sin(phi) * e2));
            q.weights.push_back(0.5 * mu.w[i] / opts.n_azimuth);
        }
    }
    return q;
}

//---------------------------------------------------------------------------//
RayRule make_ray_rule(Vec3 const& x, Vec3 const& v, double s, double kn,
                      AbsorptionField const& sigma,
                      TransportOptions const& opts)
{
    RayRule rule;
    double tau_s = s / kn;
    double tau_end = std::min(tau_s, kTauBreaks[kTauPanels]);
    auto const& full = full_panel_rules(opts.t_per_panel);
    for (int k = 0; k < kTauPanels && kTauBreaks[k] < tau_end; ++k)
    {
        double a = kTauBreaks[k], b = kTauBreaks[k + 1];
        Rule1D partial;
        Rule1D const* r = &full[k];
        if (tau_end < b)
        {
            partial = gauss_exponential(tau_end - a, opts.t_per_panel);
            r = &partial;
        }
        double scale = std::exp(-a);
        for (std::size_t i = 0; i < r->size(); ++i)
        {
            rule.t.push_back(kn * (a + r->x[i]));
            rule.w.push_back(scale * r->w[i]);
        }
    }
    rule.exit_weight = std::exp(-tau_s);

    double ca, cb;
    if (sigma.is_zero() || !support_chord(x, v, sigma.r_support(), ca, cb))
        return rule;
    // Cumulative absorption depth at the ascending nodes, then at s.
    double prev = 0, acc = 0;
    auto advance = [&](double t) {
        acc += sigma_piece(sigma, x, v, std::max(prev, ca), std::min(t, cb));
        prev = std::max(prev, t);
        return acc;
    };
    for (std::size_t k = 0; k < rule.t.size(); ++k)
        rule.w[k] *= std::exp(-kn * advance(rule.t[k]));
    rule.exit_weight *= std::exp(-kn * advance(s));
    return rule;
}

//---------------------------------------------------------------------------//
ModeSystem assemble_mode_system(int l, double kn, AbsorptionField const& sigma,
                                RadialGrid const& grid,
                                TransportOptions const& opts)
{
    check_kn(kn);
    if (l < 0)
        throw ArgumentError("assemble_mode_system: negative degree");
    std::size_t N = grid.size();
    ModeSystem sys;
    sys.l = l;
    sys.K = Eigen::MatrixXd::Zero(N, N);
    sys.b = Eigen::VectorXd::Zero(N);
    Rule1D mu = composite_gauss(graded_polar_breaks(), opts.mu_per_panel);
    parallel_for(
        N,
        [&](std::size_t i) {
            double r = grid.r[i];
            Vec3 x(0, 0, r);
            for (std::size_t a = 0; a < mu.size(); ++a)
            {
                double m = mu.x[a];
                Vec3 v(std::sqrt(std::max(0.0, 1 - m * m)), 0, m);
                double s = exit_distance_unit(x, v);
                RayRule rule = make_ray_rule(x, v, s, kn, sigma, opts);
                double wa = 0.5 * mu.w[a];
                for (std::size_t k = 0; k < rule.t.size(); ++k)
                {
                    double t = rule.t[k];
                    double rho = std::sqrt(
                        std::max(0.0, r * r - 2 * r * t * m + t * t));
                    double c = rho > 1e-300 ? (r - t * m) / rho : -m;
                    double w = wa * rule.w[k] * legendre_p(l, std::clamp(c, -1.0, 1.0));
                    std::size_t first;
                    std::array<double, 4> cw;
                    grid.stencil(rho, first, cw);
                    for (int q = 0; q < 4; ++q)
                        sys.K(i, first + q) += w * cw[q];
                }
                sys.b[i] += wa * rule.exit_weight
                            * legendre_p(l, std::clamp(r - s * m, -1.0, 1.0));
            }
        },
        opts.threads);
    return sys;
}

ModeSolve solve_mode_system(ModeSystem const& sys, double kn,
                            TransportOptions const& opts)
{
    Eigen::Index N = sys.b.size();
    ModeSolve out;
    double bnorm = sys.b.norm();
    if (bnorm == 0)
    {
        out.U = Eigen::VectorXd::Zero(N);
        return out;
    }
    int max_iter = opts.max_iter > 0
                       ? opts.max_iter
                       : static_cast<int>(std::ceil(10.0 / kn));
    int window = std::max(0, opts.anderson_window);
    auto relres = [&](Eigen::VectorXd const& U) {
        return (U - sys.K * U - sys.b).norm() / bnorm;
    };

    Eigen::VectorXd U = sys.b;
    std::deque<Eigen::VectorXd> dF, dG;
    Eigen::VectorXd F_prev, G_prev;
    double res = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < max_iter; ++it)
    {
        Eigen::VectorXd G = sys.K * U + sys.b;
        Eigen::VectorXd F = G - U;
        res = F.norm() / bnorm;
        if (res <= opts.tol)
            break;
        if (it > 0 && window > 0)
        {
            dF.push_back(F - F_prev);
            dG.push_back(G - G_prev);
            if (static_cast<int>(dF.size()) > window)
            {
                dF.pop_front();
                dG.pop_front();
            }
        }
        F_prev = F;
        G_prev = G;
        if (dF.empty())
        {
            U = G;
            continue;
        }
        Eigen::MatrixXd DF(N, dF.size()), DG(N, dG.size());
        for (std::size_t c = 0; c < dF.size(); ++c)
        {
            DF.col(c) = dF[c];
            DG.col(c) = dG[c];
        }
        Eigen::VectorXd gamma = DF.colPivHouseholderQr().solve(F);
        U = G - DG * gamma;
    }
    out.iterations = it;
    if (res <= opts.tol)
    {
        out.U = U;
        out.residual = relres(U);
        return out;
    }
    // Contraction too weak for the iteration budget: solve directly.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N) - sys.K;
    out.U = A.partialPivLu().solve(sys.b);
    out.residual = relres(out.U);
    out.used_direct = true;
    if (!(out.residual <= 100 * opts.tol))
        throw NumericalError("solve_mode_system: residual above tolerance",
                             out.residual);
    return out;
}

//---------------------------------------------------------------------------//
double TransportSolution::profile(int l, double rho) const
{
    auto it = modes.find(l);
    if (it == modes.end())
        return 0;
    return grid.interpolate(it->second.U, rho);
}

double TransportSolution::mean(Vec3 const& x) const
{
    int L = f.max_degree();
    thread_local std::vector<double> Y;
    real_sph_harm_all(L, axis_of(x), Y);
    double rho = x.norm();
    auto const& c = f.coeffs();
    double acc = 0;
    for (int l = 0; l <= L; ++l)
    {
        auto it = modes.find(l);
        if (it == modes.end())
            continue;
        double U = grid.interpolate(it->second.U, rho);
        for (int m = -l; m <= l; ++m)
        {
            int k = harmonic_index(3, l, m);
            if (k < c.size() && c[k] != 0)
                acc += c[k] * U * Y[k];
        }
    }
    return acc;
}

TransportSolution solve_mean_intensity(BoundaryData const& f, double kn,
                                       AbsorptionField const& sigma,
                                       SpatialMesh const& mesh,
                                       TransportOptions const& opts,
                                       Orientation orientation)
{
    check_kn(kn);
    if (f.dim() != 3)
        throw UnsupportedError("solve_mean_intensity: only d = 3 is supported");
    if (!sigma.compactly_supported(1.0))
        throw DomainError("solve_mean_intensity: sigma_a support must lie inside the ball");
    TransportSolution sol;
    sol.kn = kn;
    sol.f = f;
    sol.sigma = sigma;
    sol.grid = make_radial_grid(kn, opts);
    sol.orientation = orientation;
    sol.options = opts;
    sol.mesh = mesh;
    for (int l : f.degrees())
    {
        ModeSystem sys = assemble_mode_system(l, kn, sigma, sol.grid, opts);
        ModeSolve ms = solve_mode_system(sys, kn, opts);
        sol.residual = std::max(sol.residual, ms.residual);
        sol.modes.emplace(l, std::move(ms));
    }
    sol.mesh_mean.resize(mesh.size());
    parallel_for(
        mesh.size(),
        [&](std::size_t i) { sol.mesh_mean[i] = sol.mean(mesh.centers[i]); },
        opts.threads);
    return sol;
}

//---------------------------------------------------------------------------//
double kernel_E_D(Vec3 const& x, Vec3 const& eta, double kn,
                  AbsorptionField const& sigma, int d)
{
    if (!(kn > 0))
        throw ArgumentError("kernel_E_D: Kn must be positive");
    if (d != 2 && d != 3)
        throw ArgumentError("kernel_E_D: dimension must be 2 or 3");
    double r = (x - eta).norm();
    if (r == 0)
        throw DomainError("kernel_E_D: coincident points");
    double depth = r / kn;
    if (!sigma.is_zero())
        depth += kn * segment_integral(sigma, x, eta);
    double cd = d == 3 ? 4 * std::numbers::pi : 2 * std::numbers::pi;
    return std::exp(-depth) / (cd * kn * std::pow(r, d - 1));
}

double boundary_source(BoundaryData const& f, Vec3 const& x, double kn,
                       AbsorptionField const& sigma,
                       TransportOptions const& opts)
{
    if (!(kn > 0))
        throw ArgumentError("boundary_source: Kn must be positive");
    AngularQuadrature q = graded_quadrature_about(axis_of(x), opts);
    double acc = 0;
    for (std::size_t a = 0; a < q.size(); ++a)
    {
        Vec3 const& v = q.nodes[a];
        double s = exit_distance_unit(x, v);
        Vec3 y = x - s * v;
        double depth = s / kn;
        if (!sigma.is_zero())
            depth += kn * segment_integral(sigma, x, y);
        acc += q.weights[a] * std::exp(-depth) * f(y.normalized());
    }
    return acc;
}

double kernel_mass(Vec3 const& x, double kn, AbsorptionField const& sigma,
                   TransportOptions const& opts)
{
    if (!(kn > 0))
        throw ArgumentError("kernel_mass: Kn must be positive");
    double acc = 0;
    for_each_kernel_node(x, kn, sigma, opts,
                         [&](Vec3 const&, double w) { acc += w; });
    return acc;
}

double apply_nonlocal_L(std::function<double(Vec3 const&)> const& phi,
                        Vec3 const& x, double kn, AbsorptionField const& sigma,
                        TransportOptions const& opts)
{
    if (!(kn > 0))
        throw ArgumentError("apply_nonlocal_L: Kn must be positive");
    double acc = 0;
    for_each_kernel_node(x, kn, sigma, opts,
                         [&](Vec3 const& eta, double w) { acc += w * phi(eta); });
    return phi(x) - acc;
}

//---------------------------------------------------------------------------//
double reconstruct_u(TransportSolution const& sol, Vec3 const& x,
                     Vec3 const& v)
{
    Vec3 w = sol.orientation == Orientation::forward ? v : Vec3(-v);
    double s = exit_distance_unit(x, w);
    RayRule rule = make_ray_rule(x, w, s, sol.kn, sol.sigma, sol.options);
    Vec3 y = x - s * w;
    double acc = rule.exit_weight * sol.f(y.normalized());
    for (std::size_t k = 0; k < rule.t.size(); ++k)
        acc += rule.w[k] * sol.mean(x - rule.t[k] * w);
    return acc;
}

AngularMoments reconstruct_moments(TransportSolution const& sol, Vec3 const& x)
{
    AngularQuadrature q = graded_quadrature_about(axis_of(x), sol.options);
    AngularMoments m;
    for (std::size_t a = 0; a < q.size(); ++a)
    {
        double u = reconstruct_u(sol, x, q.nodes[a]);
        m.mean += q.weights[a] * u;
        m.flux += q.weights[a] * u * q.nodes[a];
    }
    return m;
}

double boundary_flux(TransportSolution const& sol, Vec3 const& boundary_point)
{
    Vec3 n = boundary_point.normalized();
    Vec3 x = n;
    AngularQuadrature q = graded_quadrature_about(n, sol.options);
    double fb = sol.f(n);
    bool forward = sol.orientation == Orientation::forward;
    double acc = 0;
    for (std::size_t a = 0; a < q.size(); ++a)
    {
        double mu = q.nodes[a].dot(n);
        bool prescribed = forward ? mu < 0 : mu > 0;
        double u = prescribed ? fb : reconstruct_u(sol, x, q.nodes[a]);
        acc += q.weights[a] * mu * u;
    }
    return acc / sol.kn;
}

//---------------------------------------------------------------------------//
double phi1(Vec3 const& x)
{
    // Unit ball: max |x|^2 = 1 and diameter 2.
    double const R = 1.0, diam = 2.0;
    double cd = 2 * R * R + 2 * diam * diam + 4 * diam + 4;
    return cd - x.squaredNorm();
}

double phi2(Vec3 const& x, double kn, double A, Phi2Constants const& c)
{
    double d = std::max(0.0, 1 - x.norm());
    double const R = 1.0;
    double near = 1 - c.gamma / (1 + std::pow(d / (A * kn), 2));
    double cap = 1 - c.gamma / (1 + std::pow(c.mu * R / (A * kn), 2));
    return c.C1 * phi1(x) + c.C2 * std::min(near, cap);
}

namespace
{
double supersolution_bound(std::string const& kind, Vec3 const& x, double kn,
                           double A)
{
    if (kind == "phi1")
        return 2 * kn * kn;
    return std::exp(-(1 - x.norm()) / (A * kn));
}

void check_supersolution_args(std::string const& kind, double kn, double A,
                              std::vector<Vec3> const& samples)
{
    if (kind != "phi1" && kind != "phi2")
        throw ArgumentError("verify_supersolution: kind must be phi1 or phi2");
    if (!(kn > 0) || !(A >= 1))
        throw ArgumentError("verify_supersolution: need Kn > 0 and A >= 1");
    for (auto const& x : samples)
        if (!(x.norm() < 1))
            throw DomainError("verify_supersolution: samples must be interior");
}
}  // namespace

SupersolutionReport verify_supersolution(std::string const& kind, double kn,
                                         double A,
                                         std::vector<Vec3> const& samples,
                                         AbsorptionField const& sigma,
                                         Phi2Constants const& c,
                                         TransportOptions const& opts)
{
    check_supersolution_args(kind, kn, A, samples);
    std::function<double(Vec3 const&)> phi;
    if (kind == "phi1")
        phi = phi1;
    else
        phi = [&](Vec3 const& x) { return phi2(x, kn, A, c); };
    std::vector<double> margin(samples.size()), tol(samples.size());
    parallel_for(
        samples.size(),
        [&](std::size_t i) {
            double L = apply_nonlocal_L(phi, samples[i], kn, sigma, opts);
            margin[i] = L - supersolution_bound(kind, samples[i], kn, A);
            tol[i] = 1e-10 * (1 + std::abs(phi(samples[i])));
        },
        opts.threads);
    SupersolutionReport rep;
    rep.kind = kind;
    rep.samples = static_cast<int>(samples.size());
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        rep.tolerance = std::max(rep.tolerance, tol[i]);
        if (margin[i] < -tol[i])
            ++rep.violations;
        if (margin[i] < rep.min_margin)
        {
            rep.min_margin = margin[i];
            rep.worst_point = samples[i];
        }
    }
    return rep;
}

Phi2Constants calibrate_phi2(double kn, double A,
                             std::vector<Vec3> const& samples,
                             AbsorptionField const& sigma,
                             TransportOptions const& opts)
{
    check_supersolution_args("phi2", kn, A, samples);
    static double const gammas[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    static double const mus[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    static double const c1s[] = {0.25, 0.5, 1, 2, 4};
    static double const c2s[] = {0.5, 1, 2, 4, 8};
    constexpr int G = 5, M = 5;
    // L[phi1] and L[psi_{gamma,mu}] per sample; phi2 is linear in (C1, C2).
    std::size_t S = samples.size();
    std::vector<double> l1(S);
    std::vector<std::array<double, G * M>> lpsi(S);
    auto psi = [&](Vec3 const& x, int g, int m) {
        Phi2Constants c{0, 1, gammas[g], mus[m]};
        return phi2(x, kn, A, c);
    };
    parallel_for(
        S,
        [&](std::size_t i) {
            Vec3 const& x = samples[i];
            double acc1 = 0;
            std::array<double, G * M> acc{};
            for_each_kernel_node(x, kn, sigma, opts,
                                 [&](Vec3 const& eta, double w) {
                                     acc1 += w * phi1(eta);
                                     for (int g = 0; g < G; ++g)
                                         for (int m = 0; m < M; ++m)
                                             acc[g * M + m] += w * psi(eta, g, m);
                                 });
            l1[i] = phi1(x) - acc1;
            for (int g = 0; g < G; ++g)
                for (int m = 0; m < M; ++m)
                    lpsi[i][g * M + m] = psi(x, g, m) - acc[g * M + m];
        },
        opts.threads);
    Phi2Constants best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < G; ++g)
        for (int m = 0; m < M; ++m)
            for (double C1 : c1s)
                for (double C2 : c2s)
                {
                    double score = std::numeric_limits<double>::infinity();
                    for (std::size_t i = 0; i < S; ++i)
                    {
                        double b = supersolution_bound("phi2", samples[i], kn, A);
                        double L = C1 * l1[i] + C2 * lpsi[i][g * M + m];
                        score = std::min(score, (L - b) / b);
                    }
                    if (score > best_score)
                    {
                        best_score = score;
                        best = Phi2Constants{C1, C2, gammas[g], mus[m]};
                    }
                }
    return best;
}

}  // namespace knt
