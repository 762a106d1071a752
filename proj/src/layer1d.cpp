#include "knt/layer1d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "knt/error.hpp"
#include "knt/io.hpp"
#include "knt/parallel.hpp"
#include "knt/quadrature.hpp"
#include "knt/specfun.hpp"

namespace knt
{
namespace
{
// Tails T0(z) = int_z^inf E and T1(z) = int_z^inf xi E(xi), z >= 0.
struct Tails
{
    double t0;
    double t1;
};

Tails tails(double z)
{
    if (z == 0)
        return {0.5, 0.25};
    double e2 = exp_integral_En(2, z);
    double e3 = exp_integral_En(3, z);
    return {0.5 * e2, 0.5 * (z * e2 + e3)};
}

// Moments int_a^b E(z) (1, z) dz for an interval not straddling 0.
std::pair<double, double> cell_moments(Tails const& ta, Tails const& tb,
                                       double a, double /*b*/)
{
    if (a >= 0)
        return {ta.t0 - tb.t0, ta.t1 - tb.t1};
    // b <= 0: reflect, |b| <= |a|
    return {tb.t0 - ta.t0, -(tb.t1 - ta.t1)};
}

double linear_fit_slope(std::vector<double> const& x,
                        std::vector<double> const& y, double* intercept)
{
    double n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (intercept)
        *intercept = (sy - slope * sx) / n;
    return slope;
}
}  // namespace

//---------------------------------------------------------------------------//
HalfLineGrid make_half_line_grid(int n, double ymax)
{
    if (n < 4 || !(ymax > 0))
        throw ArgumentError("make_half_line_grid: need n >= 4, ymax > 0");
    HalfLineGrid g;
    g.y.resize(n + 1);
    for (int k = 0; k <= n; ++k)
    {
        double xi = static_cast<double>(k) / n;
        g.y[k] = ymax * xi * xi;
    }
    if (g.y[1] > 1e-2)
        throw ArgumentError("make_half_line_grid: first cell wider than 1e-2");
    return g;
}

Eigen::MatrixXd assemble_layer_operator(HalfLineGrid const& grid,
                                        TailClosure closure)
{
    auto const& y = grid.y;
    std::size_t n = y.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<Tails> t(n);
        for (std::size_t j = 0; j < n; ++j)
            t[j] = tails(std::abs(y[j] - y[i]));
        for (std::size_t j = 0; j + 1 < n; ++j)
        {
            double a = y[j] - y[i], b = y[j + 1] - y[i], h = b - a;
            auto [m0, m1] = cell_moments(t[j], t[j + 1], a, b);
            // Hat weights: (b - z)/h on node j, (z - a)/h on node j+1
            A(i, j) -= (b * m0 - m1) / h;
            A(i, j + 1) -= (m1 - a * m0) / h;
        }
        if (closure == TailClosure::plateau)
            A(i, n - 1) -= t[n - 1].t0;
    });
    return A;
}

//---------------------------------------------------------------------------//
double LayerSolution::operator()(double yq) const
{
    auto const& y = grid.y;
    if (yq <= 0)
        return w.front();
    if (yq >= y.back())
        return w.back();
    auto it = std::upper_bound(y.begin(), y.end(), yq);
    std::size_t j = (it - y.begin()) - 1;
    double s = (yq - y[j]) / (y[j + 1] - y[j]);
    return (1 - s) * w[j] + s * w[j + 1];
}

void fit_layer_tail(LayerSolution& sol)
{
    auto const& y = sol.grid.y;
    double ymax = sol.grid.ymax();
    // Pinned fit w ~ W + a exp(-y/2) on [Ymax/2, 3Ymax/4]
    Eigen::MatrixXd X;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] >= 0.5 * ymax && y[i] <= 0.75 * ymax)
            idx.push_back(i);
    X.resize(idx.size(), 2);
    Eigen::VectorXd rhs(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
    {
        X(k, 0) = 1;
        X(k, 1) = std::exp(-0.5 * y[idx[k]]);
        rhs(k) = sol.w[idx[k]];
    }
    Eigen::Vector2d coef = X.colPivHouseholderQr().solve(rhs);
    sol.plateau = coef(0);
    sol.tail_amplitude = coef(1);
    sol.fit_residual
        = std::sqrt((X * coef - rhs).squaredNorm() / std::max<double>(1, idx.size()));

    // Noise floor: spread of w - W on the fit window
    double scale = 0, floor = 0;
    for (double v : sol.w)
        scale = std::max(scale, std::abs(v));
    for (auto i : idx)
        floor = std::max(floor, std::abs(sol.w[i] - sol.plateau));
    floor = std::max(floor, 1e-13 * std::max(scale, 1.0));

    // Free-rate fit of log|w - W| on y >= 1 while well above the floor
    std::vector<double> xs, ls;
    sol.decay_constant = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
    {
        double dev = std::abs(sol.w[i] - sol.plateau);
        if (y[i] <= 0.75 * ymax)
            sol.decay_constant
                = std::max(sol.decay_constant, dev * std::exp(0.5 * y[i]));
        if (y[i] >= 1.0 && dev > 1e3 * floor)
        {
            xs.push_back(y[i]);
            ls.push_back(std::log(dev));
        }
    }
    sol.decay_rate = xs.size() >= 3 ? -linear_fit_slope(xs, ls, nullptr)
                                    : std::numeric_limits<double>::quiet_NaN();
}

LayerSolution solve_layer(LayerSource const& source, HalfLineGrid const& grid,
                          TailClosure closure)
{
    Eigen::MatrixXd A = assemble_layer_operator(grid, closure);
    std::size_t n = grid.num_nodes();
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i)
        b(i) = source(grid.y[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd w = lu.solve(b);
    double bnorm = b.lpNorm<Eigen::Infinity>();
    double res = (A * w - b).lpNorm<Eigen::Infinity>();
    if (!w.allFinite())
        throw NumericalError("solve_layer: singular layer system",
                             1.0 / lu.rcond());
    LayerSolution sol;
    sol.grid = grid;
    sol.w.assign(w.data(), w.data() + n);
    sol.residual = bnorm > 0 ? res / bnorm : res;
    fit_layer_tail(sol);
    return sol;
}

//---------------------------------------------------------------------------//
LayerConstants compute_layer_constants(int n, double ymax)
{
    auto grid = make_half_line_grid(n, ymax);
    Eigen::MatrixXd A = assemble_layer_operator(grid, TailClosure::plateau);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    std::size_t m = grid.num_nodes();
    Eigen::MatrixXd B(m, 2);
    for (std::size_t i = 0; i < m; ++i)
    {
        auto [s1, s2] = layer_sources(grid.y[i]);
        B(i, 0) = s1;
        B(i, 1) = s2;
    }
    Eigen::MatrixXd W = lu.solve(B);
    LayerConstants c;
    c.n = n;
    c.ymax = ymax;
    for (int k = 0; k < 2; ++k)
    {
        LayerSolution& s = k == 0 ? c.w1 : c.w2;
        s.grid = grid;
        s.w.assign(W.col(k).data(), W.col(k).data() + m);
        double bn = B.col(k).lpNorm<Eigen::Infinity>();
        s.residual = (A * W.col(k) - B.col(k)).lpNorm<Eigen::Infinity>() / bn;
        fit_layer_tail(s);
    }
    c.W1 = c.w1.plateau;
    c.W2 = c.w2.plateau;
    c.ratio = c.W1 / c.W2;
    return c;
}

void write_layer_constants(std::string const& path, LayerConstants const& c)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "W1 = " << c.W1 << "\n"
       << "W2 = " << c.W2 << "\n"
       << "ratio = " << c.ratio << "\n"
       << "n = " << c.n << "\n"
       << "ymax = " << c.ymax << "\n";
    write_file_atomic(path, os.str());
}

double read_layer_ratio(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("read_layer_ratio: cannot open " + path);
    std::string line;
    while (std::getline(in, line))
    {
        auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        std::string key = trim(line.substr(0, eq));
        if (key == "ratio")
            return std::stod(line.substr(eq + 1));
    }
    throw ConfigError("read_layer_ratio: no ratio entry in " + path);
}

//---------------------------------------------------------------------------//
LayerSolution closed_form_mean_layer(double dn_phi, double kn,
                                     LayerConstants const& constants)
{
    if (!(kn > 0))
        throw ArgumentError("closed_form_mean_layer: Kn must be positive");
    LayerSolution s;
    s.grid = constants.w1.grid;
    double scale = -dn_phi / (2 * kn);
    s.w.resize(s.grid.num_nodes());
    for (std::size_t i = 0; i < s.w.size(); ++i)
        s.w[i] = scale
                 * (constants.w1.w[i] - constants.ratio * constants.w2.w[i]);
    s.residual = std::max(constants.w1.residual, constants.w2.residual);
    fit_layer_tail(s);
    return s;
}

//---------------------------------------------------------------------------//
MomentCheck moment_condition_check(LayerSource const& F,
                                   HalfLineGrid const& grid, bool enforce)
{
    double ymax = grid.ymax();
    std::vector<double> br;
    int panels = static_cast<int>(std::ceil(32 * ymax));
    for (int k = 0; k <= panels; ++k)
        br.push_back(-ymax + 2 * ymax * k / panels);
    auto rule = composite_gauss(br, 8);
    MomentCheck mc;
    for (std::size_t i = 0; i < rule.size(); ++i)
    {
        double f = F(rule.x[i]);
        mc.moment0 += rule.w[i] * f;
        mc.moment1 += rule.w[i] * rule.x[i] * f;
    }
    if (enforce && (std::abs(mc.moment0) > 1e-8 || std::abs(mc.moment1) > 1e-8))
    {
        std::ostringstream os;
        os << "moment_condition_check: moments (" << mc.moment0 << ", "
           << mc.moment1 << ") exceed 1e-8";
        throw PreconditionError(os.str());
    }
    // With u = 0 on y < 0 the equation for y >= 0 is the half-line problem.
    mc.solution = solve_layer(F, grid);
    mc.plateau = mc.solution.plateau;
    return mc;
}

//---------------------------------------------------------------------------//
RegularityReport layer_regularity_suite(LayerSolution const& sol, double alpha)
{
    if (!(alpha > 0 && alpha < 0.25))
        throw ArgumentError("layer_regularity_suite: alpha must be in (0, 1/4)");
    RegularityReport r;
    r.alpha = alpha;
    auto const& y = sol.grid.y;
    auto const& u = sol.w;
    std::size_t n = y.size();
    double half = 0.5 * sol.grid.ymax();
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 1; j < n; ++j)
        {
            double q = std::abs(u[i] - u[j])
                       / (std::pow(y[j] - y[i], 1 - alpha)
                          * std::exp(-0.25 * y[i]));
            r.holder_constant = std::max(r.holder_constant, q);
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        double ym = 0.5 * (y[i] + y[i + 1]);
        if (ym > half)
            break;
        double d = std::abs(u[i + 1] - u[i]) / (y[i + 1] - y[i]);
        r.derivative_constant = std::max(
            r.derivative_constant, d * std::pow(ym, alpha) * std::exp(0.25 * ym));
    }
    r.finite = std::isfinite(r.holder_constant)
               && std::isfinite(r.derivative_constant);
    return r;
}

}  // namespace knt
