//---------------------------------------------------------------------------//
/*!
 * \file instability.cpp
 */
//---------------------------------------------------------------------------//
#include "knt/instability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "knt/error.hpp"
#include "knt/harmonics.hpp"

namespace knt
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

//! Uniform points in the unit ball of R^m, one per column.
Eigen::MatrixXd sample_unit_ball(int m, std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Eigen::MatrixXd P(m, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        Eigen::VectorXd g(m);
        do
        {
            for (int a = 0; a < m; ++a)
                g[a] = normal(rng);
        } while (g.norm() == 0);
        double r = std::pow(unif(rng), 1.0 / m);
        P.col(static_cast<Eigen::Index>(i)) = r * g / g.norm();
    }
    return P;
}

//! Greedy net with a center budget; sets \c exhausted when it is hit.
std::vector<std::size_t> greedy_net_budget(Eigen::MatrixXd const& P, double t,
                                           std::size_t budget, bool& exhausted)
{
    exhausted = false;
    if (!(t > 0))
        throw ArgumentError("greedy_cover: t must be positive");
    std::size_t n = static_cast<std::size_t>(P.cols());
    std::vector<std::size_t> centers;
    if (n == 0)
        return centers;
    std::vector<double> dist(n, kInf);
    std::size_t next = 0;
    while (true)
    {
        if (centers.size() == budget)
        {
            exhausted = true;
            break;
        }
        centers.push_back(next);
        auto c = P.col(static_cast<Eigen::Index>(next));
        double far = -1;
        for (std::size_t i = 0; i < n; ++i)
        {
            double d = (P.col(static_cast<Eigen::Index>(i)) - c).norm();
            dist[i] = std::min(dist[i], d);
            if (dist[i] > far)
            {
                far = dist[i];
                next = i;
            }
        }
        // Open balls: a point at distance exactly t is not covered.
        if (far < t)
            break;
    }
    return centers;
}

double log_branch_base(double t, ModulusParams const& p)
{
    return std::abs(std::log(p.C2 * t));
}

double kn_power(ModulusParams const& p)
{
    return p.kn_exponent == KnExponent::stated ? 1.0 : 2.0;
}

void check_t(double t, ModulusParams const& p)
{
    if (!(t > 0) || !(p.C2 * t < 1) || !(p.C3 * t < 1))
        throw DomainError("modulus_lower_bound: need 0 < t < min(1/C2, 1/C3)");
}

//! log(holder branch) - log(log branch), without the shared factor.
double branch_gap(double x, ModulusParams const& p)
{
    double delta = p.s - p.s1;
    double L = -(std::log(p.C2) + x);
    return -kn_power(p) * p.gamma / delta * std::log(p.kn)
           + 8 * p.gamma / delta * x + 2 * p.gamma * std::log(L);
}
}  // namespace

//---------------------------------------------------------------------------//
SingularSpectrum::SingularSpectrum(std::vector<double> values,
                                   std::string descriptor)
    : values_(std::move(values)), descriptor_(std::move(descriptor))
{
    for (std::size_t k = 0; k < values_.size(); ++k)
    {
        if (!std::isfinite(values_[k]) || !(values_[k] > 0))
            throw ArgumentError("SingularSpectrum: values must be positive and finite");
        if (k > 0 && values_[k] > values_[k - 1])
            throw ArgumentError("SingularSpectrum: values must be nonincreasing");
    }
}

SingularSpectrum SingularSpectrum::polynomial(double nu, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = std::pow(static_cast<double>(k + 1), -nu);
    return SingularSpectrum(std::move(v), "polynomial");
}

SingularSpectrum SingularSpectrum::exponential(double mu, std::size_t n)
{
    std::vector<double> v;
    for (std::size_t k = 0; k < n; ++k)
    {
        double x = std::exp(-std::pow(static_cast<double>(k + 1), mu));
        if (!(x > 0))
            break;
        v.push_back(x);
    }
    return SingularSpectrum(std::move(v), "exponential");
}

//---------------------------------------------------------------------------//
std::vector<std::size_t> greedy_net(Eigen::MatrixXd const& points, double t)
{
    bool exhausted = false;
    return greedy_net_budget(points, t, std::numeric_limits<std::size_t>::max(),
                             exhausted);
}

std::size_t greedy_cover(Eigen::MatrixXd const& points, double t)
{
    return greedy_net(points, t).size();
}

VolumeBounds unit_square_volume_bounds(double t)
{
    if (!(t > 0))
        throw ArgumentError("unit_square_volume_bounds: t must be positive");
    double pi = std::numbers::pi, h = t / 2;
    // Minkowski sum of the unit square with a disc of radius h.
    return {1 / (pi * t * t), (1 + 4 * h + pi * h * h) / (pi * h * h)};
}

EntropyBounds entropy_bounds_from_spectrum(SingularSpectrum const& sigma,
                                           double t)
{
    if (!(t > 0))
        throw ArgumentError("entropy_bounds_from_spectrum: t must be positive");
    EntropyBounds b;
    for (double x : sigma.values())
    {
        if (x >= 2 * t)
        {
            ++b.m1;
            b.lower += std::log(x / t);
        }
        if (x >= t / 3)
        {
            ++b.m2;
            b.upper += std::log(x / t);
        }
    }
    b.upper += static_cast<double>(b.m2) * std::log(12.0);
    return b;
}

Eigen::MatrixXd sample_ellipsoid(std::vector<double> const& axes,
                                 std::size_t n, std::uint64_t seed)
{
    if (axes.empty())
        throw ArgumentError("sample_ellipsoid: no axes");
    auto rng = make_rng(seed, axes.size());
    int m = static_cast<int>(axes.size());
    Eigen::MatrixXd P = sample_unit_ball(m, n, rng);
    for (int a = 0; a < m; ++a)
        P.row(a) *= axes[a];
    return P;
}

SandwichReport sandwich_validation(std::vector<double> const& axes, double t,
                                   SandwichOptions const& opts)
{
    if (axes.empty() || axes.size() > 4)
        throw ArgumentError("sandwich_validation: dimension must be 1..4");
    if (!(t > 0))
        throw ArgumentError("sandwich_validation: t must be positive");
    std::vector<double> sorted = axes;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    SandwichReport rep;
    rep.axes = axes;
    rep.t = t;
    rep.bounds = entropy_bounds_from_spectrum(SingularSpectrum(sorted, "ellipsoid"), t);
    rep.slack = static_cast<double>(axes.size()) * std::log(2.0);

    Eigen::MatrixXd P = sample_ellipsoid(axes, opts.n_samples, opts.seed);
    bool ex_t = false, ex_h = false;
    rep.n_t = greedy_net_budget(P, t, opts.max_centers, ex_t).size();
    rep.n_half = greedy_net_budget(P, t / 2, opts.max_centers, ex_h).size();
    rep.partial = ex_t || ex_h;
    rep.log_n_t = std::log(static_cast<double>(rep.n_t));
    rep.log_n_half = std::log(static_cast<double>(rep.n_half));
    rep.lower_ok = rep.bounds.lower <= rep.log_n_half;
    rep.upper_ok = rep.log_n_t <= rep.bounds.upper + rep.slack;
    return rep;
}

//---------------------------------------------------------------------------//
ComparisonBound comparison_upper_bound(SingularSpectrum const& tau, double t,
                                       ComparisonOptions const& opts)
{
    if (!(t > 0))
        throw ArgumentError("comparison_upper_bound: t must be positive");
    if (!(opts.C > 0) || opts.iota_norm < 0)
        throw ArgumentError("comparison_upper_bound: C > 0 and ||iota|| >= 0 required");
    if (tau.empty())
        throw PreconditionError("comparison_upper_bound: empty spectrum");
    std::size_t n = tau.size();

    ComparisonBound b;
    b.C = opts.C;
    for (double x : tau.values())
        b.C_tau += std::sqrt(x);
    // Tail: fit tau_k ~ k^{-p} on the last half; sum tau^{1/2} needs p > 2.
    if (n >= 8)
    {
        std::vector<double> lk, lt;
        for (std::size_t k = n / 2; k < n; ++k)
        {
            lk.push_back(std::log(static_cast<double>(k + 1)));
            lt.push_back(std::log(tau[k]));
        }
        double p = -least_squares_slope(lk, lt);
        if (!(p > 2))
        {
            std::ostringstream os;
            os << "comparison_upper_bound: sum of tau_k^{1/2} diverges (tail "
                  "exponent " << p << " <= 2)";
            throw PreconditionError(os.str());
        }
        b.tail_estimate = std::sqrt(tau[n - 1]) * static_cast<double>(n) / (p / 2 - 1);
    }

    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k)
        f[k] = std::pow(tau[k], 0.25);
    b.iota_norm = opts.iota_norm > 0 ? opts.iota_norm : f[0] * f[0];
    b.threshold = t / (3 * b.C_tau);
    for (std::size_t k = 0; k < n; ++k)
    {
        // f nonincreasing: count the prefix with f_k f_j >= threshold.
        std::size_t lo = 0, hi = n;
        while (lo < hi)
        {
            std::size_t mid = (lo + hi) / 2;
            if (f[k] * f[mid] >= b.threshold)
                lo = mid + 1;
            else
                hi = mid;
        }
        b.m += lo;
        if (f[k] >= b.threshold)
            ++b.g_count;
    }
    b.g_valid = tau[0] <= 1;
    double lf = 1 + std::log(b.C_tau * b.iota_norm / t);
    b.log_bound = b.C * static_cast<double>(b.m) * lf;
    b.log_bound_g = b.C * static_cast<double>(b.g_count * b.g_count) * lf;
    return b;
}

//---------------------------------------------------------------------------//
SumPropertyReport singular_sum_property(int trials, int rows1, int rows2,
                                        int cols, std::uint64_t seed,
                                        bool zero_second)
{
    if (trials < 0 || rows1 < 1 || rows2 < 1 || cols < 1 || rows1 > 40
        || rows2 > 40 || cols > 40)
        throw ArgumentError("singular_sum_property: sizes must be in 1..40");
    SumPropertyReport rep;
    rep.trials = trials;
    rep.max_excess = -kInf;
    auto sv = [](Eigen::MatrixXd const& M, int n) {
        Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
        out.head(std::min<Eigen::Index>(n, s.size())) = s.head(std::min<Eigen::Index>(n, s.size()));
        return out;
    };
    for (int tr = 0; tr < trials; ++tr)
    {
        auto rng = make_rng(seed, static_cast<std::uint64_t>(tr));
        std::normal_distribution<double> normal;
        Eigen::MatrixXd A1(rows1, cols), A2(rows2, cols);
        for (Eigen::Index i = 0; i < A1.size(); ++i)
            A1.data()[i] = normal(rng);
        for (Eigen::Index i = 0; i < A2.size(); ++i)
            A2.data()[i] = zero_second ? 0.0 : normal(rng);
        Eigen::MatrixXd A(rows1 + rows2, cols);
        A << A1, A2;
        Eigen::VectorXd s = sv(A, cols), s1 = sv(A1, cols), s2 = sv(A2, cols);
        for (int i = 1; i <= cols; ++i)
            for (int j = 1; i + j - 1 <= cols; ++j)
            {
                double ex = s[i + j - 2] - s1[i - 1] - s2[j - 1];
                rep.max_excess = std::max(rep.max_excess, ex);
                ++rep.checks;
                if (ex > 1e-10)
                    ++rep.violations;
            }
    }
    return rep;
}

//---------------------------------------------------------------------------//
NonnegCover nonneg_cover_lower(int m, double t, std::size_t n_samples,
                               std::uint64_t seed)
{
    if (m < 1 || m > 6)
        throw ArgumentError("nonneg_cover_lower: dimension must be 1..6");
    if (!(t > 0))
        throw ArgumentError("nonneg_cover_lower: t must be positive");
    NonnegCover c;
    c.m = m;
    c.t = t;
    // vol(B_1 cap orthant) / vol(B_t) = 2^{-m} t^{-m}.
    c.lower = std::pow(2 * t, -m);
    auto rng = make_rng(seed, static_cast<std::uint64_t>(m));
    Eigen::MatrixXd P = sample_unit_ball(m, n_samples, rng).cwiseAbs();
    c.greedy = greedy_cover(P, t);
    return c;
}

//---------------------------------------------------------------------------//
void validate_modulus_params(ModulusParams const& p)
{
    std::vector<std::string> failed;
    auto need = [&](bool ok, std::string const& what) {
        if (!ok)
            failed.push_back(what);
    };
    need(p.d >= 2, "d >= 2");
    int hd = p.d / 2;
    need(p.s1 == 4.5 + hd, "s1 = 9/2 + floor(d/2)");
    need(p.gamma > hd + 3, "gamma > floor(d/2) + 3");
    need(p.s > 2 * p.d + p.s1, "s > 2d + s1");
    need(p.kn > 0 && p.kn <= 1, "0 < Kn <= 1");
    need(p.C1 > 0 && p.C2 > 0 && p.C3 > 0, "C1, C2, C3 > 0");
    if (!failed.empty())
    {
        std::string msg = "modulus parameters violate:";
        for (auto const& f : failed)
            msg += " [" + f + "]";
        throw ConfigError(msg);
    }
}

char const* to_string(Regime r)
{
    return r == Regime::holder ? "holder" : "log";
}

ModulusValue modulus_lower_bound(double t, ModulusParams const& p)
{
    validate_modulus_params(p);
    check_t(t, p);
    double delta = p.s - p.s1;
    double shared = p.C1 * std::pow(1 + std::abs(std::log(p.C3 * t)), -p.gamma / p.d);
    ModulusValue v;
    v.log = shared * std::pow(log_branch_base(t, p), -2 * p.gamma);
    v.holder = shared * std::pow(p.kn, -kn_power(p) * p.gamma / delta)
               * std::pow(t, 8 * p.gamma / delta);
    v.regime = v.holder <= v.log ? Regime::holder : Regime::logarithmic;
    v.omega = std::min(v.holder, v.log);
    return v;
}

double modulus_lower_bound_via_g(double t, ModulusParams const& p)
{
    validate_modulus_params(p);
    check_t(t, p);
    double mu = 1.0 / p.d, nu = (p.s - p.s1) / p.d;
    // Inverse of f(s) = max(exp(-s^mu / 4), Kn^{kappa/4} s^{-nu/4}).
    double kappa = p.kn_exponent == KnExponent::stated ? 0.5 : 1.0;
    double lg = std::max(std::log(log_branch_base(t, p)) / mu,
                         kappa / nu * std::log(p.kn) - 4 / nu * std::log(t));
    double alpha = p.d / p.gamma;
    double log_entropy = 2 * lg + std::log(1 + std::abs(std::log(p.C3 * t)));
    return p.C1 * std::exp(-log_entropy / alpha);
}

ModulusCurve modulus_curve(ModulusParams const& p, double t_min, double t_max,
                           int n)
{
    if (n < 2 || !(t_min > 0) || !(t_max > t_min))
        throw ArgumentError("modulus_curve: need n >= 2 and 0 < t_min < t_max");
    ModulusCurve c;
    c.params = p;
    for (int i = 0; i < n; ++i)
    {
        double t = std::exp(std::log(t_min)
                            + (std::log(t_max) - std::log(t_min)) * i / (n - 1));
        auto v = modulus_lower_bound(t, p);
        c.t.push_back(t);
        c.omega.push_back(v.omega);
        c.regime.push_back(v.regime);
    }
    return c;
}

//---------------------------------------------------------------------------//
TransitionRow crossover_point(ModulusParams const& p)
{
    validate_modulus_params(p);
    TransitionRow row;
    row.kn = p.kn;
    double delta = p.s - p.s1;
    // The gap peaks where |log C2 t| = (s - s1)/4; the Hölder/log
    // crossover is the root below the peak.
    double x_hi = -std::log(p.C2) - delta / 4;
    if (!(branch_gap(x_hi, p) > 0))
    {
        row.note = "branches do not cross";
        return row;
    }
    double x_lo = x_hi - 1;
    for (int expand = 0; expand < 200 && branch_gap(x_lo, p) >= 0; ++expand)
        x_lo -= 10;
    if (branch_gap(x_lo, p) >= 0)
    {
        row.note = "no sign change in bracket";
        return row;
    }
    for (int it = 0; it < 200 && x_hi - x_lo > 1e-14 * std::max(1.0, std::abs(x_lo)); ++it)
    {
        double mid = 0.5 * (x_lo + x_hi);
        (branch_gap(mid, p) < 0 ? x_lo : x_hi) = mid;
    }
    row.t_star = std::exp(0.5 * (x_lo + x_hi));
    row.found = true;
    return row;
}

TransitionStudy transition_study(std::vector<double> const& kn_list,
                                 ModulusParams const& p)
{
    if (kn_list.size() < 2)
        throw ArgumentError("transition_study: need at least two Kn values");
    double lo_kn = *std::min_element(kn_list.begin(), kn_list.end());
    double hi_kn = *std::max_element(kn_list.begin(), kn_list.end());
    if (!(lo_kn > 0) || hi_kn / lo_kn < 1e3 * (1 - 1e-12))
        throw ArgumentError("transition_study: Kn list must span three decades");

    double delta = p.s - p.s1;
    TransitionStudy st;
    std::vector<double> lk, lt, lc;
    for (double kn : kn_list)
    {
        ModulusParams q = p;
        q.kn = kn;
        TransitionRow row = crossover_point(q);
        st.rows.push_back(row);
        if (!row.found)
            continue;
        double x = std::log(row.t_star);
        lk.push_back(std::log(kn));
        lt.push_back(x);
        lc.push_back(x + delta / 4 * std::log(std::abs(std::log(p.C2) + x)));
    }
    if (lk.size() < 2)
        return st;
    st.beta = least_squares_slope(lk, lc);
    st.beta_raw = least_squares_slope(lk, lt);

    // One-decade windows over the sorted roots.
    std::vector<std::size_t> order(lk.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lk[a] < lk[b]; });
    st.increasing = true;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (!(lt[order[i]] > lt[order[i - 1]]))
            st.increasing = false;
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        std::size_t j = i + 1;
        while (j < order.size() && lk[order[j]] - lk[order[i]] < std::log(10.0) - 1e-9)
            ++j;
        if (j >= order.size())
            break;
        std::vector<double> wx, wy;
        for (std::size_t q = i; q <= j; ++q)
        {
            wx.push_back(lk[order[q]]);
            wy.push_back(lc[order[q]]);
        }
        double b = least_squares_slope(wx, wy);
        st.window_beta.push_back(b);
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    st.beta_spread = st.window_beta.empty() ? 0 : hi - lo;
    return st;
}

//---------------------------------------------------------------------------//
std::vector<double> weighted_difference_svd(AlbedoMatrix const& A1,
                                            AlbedoMatrix const& A2, double s)
{
    if (A1.size() != A2.size() || A1.degree != A2.degree)
        throw ArgumentError("weighted_difference_svd: bases differ");
    if (s < 0)
        throw ArgumentError("weighted_difference_svd: s must be nonnegative");
    int n = A1.size();
    Eigen::VectorXd w(n);
    for (int k = 0; k < n; ++k)
        w[k] = std::pow(1 + A1.eigenvalue(k), -s / 2);
    Eigen::MatrixXd B = w.asDiagonal() * (A1.M - A2.M) * w.asDiagonal();
    Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues();
    return std::vector<double>(sv.data(), sv.data() + sv.size());
}

SvdStudyOptions default_svd_options()
{
    SvdStudyOptions o;
    o.refined.mu_per_panel = 2 * o.transport.mu_per_panel;
    o.refined.t_per_panel = 2 * o.transport.t_per_panel;
    return o;
}

void analyze_spectrum(SvdRun& run, int d)
{
    run.block_k.clear();
    run.block_tau.clear();
    for (int l = 0;; ++l)
    {
        std::size_t k = static_cast<std::size_t>((l + 1) * (l + 1));
        if (k > run.usable)
            break;
        run.block_k.push_back(static_cast<double>(k));
        run.block_tau.push_back(run.values[k - 1]);
    }
    std::size_t nb = run.block_k.size();
    std::vector<double> root, lk, lt;
    for (std::size_t b = 0; b < nb; ++b)
    {
        root.push_back(std::pow(run.block_k[b], 1.0 / d));
        lk.push_back(std::log(run.block_k[b]));
        lt.push_back(std::log(run.block_tau[b]));
    }
    auto slice = [](std::vector<double> const& v, std::size_t a, std::size_t b) {
        return std::vector<double>(v.begin() + static_cast<long>(a),
                                   v.begin() + static_cast<long>(b));
    };
    auto sse = [](LineFit const& f, std::vector<double> const& x,
                  std::vector<double> const& y) {
        double e = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            e += std::pow(y[i] - f.slope * x[i] - f.intercept, 2);
        return e;
    };

    // Split minimizing the residual of head (log tau vs k^{1/d}) plus tail
    // (log tau vs log k), with at least three head and two tail blocks.
    std::size_t split = nb;
    if (nb >= 5)
    {
        double best = kInf;
        for (std::size_t c = 3; c + 2 <= nb; ++c)
        {
            auto hf = fit_line(slice(root, 0, c), slice(lt, 0, c));
            auto tf = fit_line(slice(lk, c, nb), slice(lt, c, nb));
            double e = sse(hf, slice(root, 0, c), slice(lt, 0, c))
                       + sse(tf, slice(lk, c, nb), slice(lt, c, nb));
            if (e < best)
            {
                best = e;
                split = c;
            }
        }
    }
    run.has_tail = split < nb;
    run.crossover = split < nb ? static_cast<std::size_t>(run.block_k[split])
                               : run.usable + 1;
    if (split >= 2)
        run.head = fit_line(slice(root, 0, split), slice(lt, 0, split));
    if (run.has_tail)
        run.tail = fit_line(slice(lk, split, nb), slice(lt, split, nb));

    // Concavity on log-log: quadratic coefficient of the head blocks.
    if (split >= 3)
    {
        Eigen::MatrixXd V(static_cast<Eigen::Index>(split), 3);
        Eigen::VectorXd y(static_cast<Eigen::Index>(split));
        for (std::size_t b = 0; b < split; ++b)
        {
            V(static_cast<Eigen::Index>(b), 0) = 1;
            V(static_cast<Eigen::Index>(b), 1) = lk[b];
            V(static_cast<Eigen::Index>(b), 2) = lk[b] * lk[b];
            y[static_cast<Eigen::Index>(b)] = lt[b];
        }
        Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
        run.head_curvature = c[2];
        run.head_concave = c[2] < 0;
    }
}

SvdStudy albedo_svd_study(AbsorptionField const& sigma1,
                          AbsorptionField const& sigma2,
                          std::vector<double> const& kn_list,
                          SvdStudyOptions const& opts)
{
    if (kn_list.empty())
        throw ArgumentError("albedo_svd_study: empty Kn list");
    if (opts.max_degree < 1 || !(opts.floor > 0) || !(opts.agreement > 0))
        throw ArgumentError("albedo_svd_study: invalid options");
    int n_b = harmonic_count(3, opts.max_degree);
    SvdStudy st;
    for (double kn : kn_list)
    {
        SvdRun run;
        run.kn = kn;
        auto a1 = assemble_albedo_modal(sigma1, kn, n_b, opts.transport);
        auto a2 = assemble_albedo_modal(sigma2, kn, n_b, opts.transport);
        run.values = weighted_difference_svd(a1, a2, opts.s);
        auto r1 = assemble_albedo_modal(sigma1, kn, n_b, opts.refined);
        auto r2 = assemble_albedo_modal(sigma2, kn, n_b, opts.refined);
        run.refined = weighted_difference_svd(r1, r2, opts.s);
        // Leading values above the floor that the refined run reproduces.
        while (run.usable < run.values.size())
        {
            double v = run.values[run.usable], r = run.refined[run.usable];
            if (!(v >= opts.floor) || std::abs(v - r) > opts.agreement * v)
                break;
            ++run.usable;
        }
        run.truncated = run.usable < run.values.size();
        analyze_spectrum(run);
        st.runs.push_back(std::move(run));
    }
    for (std::size_t i = 1; i < st.runs.size(); ++i)
    {
        if (i == 1)
            st.crossover_increasing = true;
        if (!(st.runs[i].crossover > st.runs[i - 1].crossover
              && st.runs[i].kn < st.runs[i - 1].kn))
            st.crossover_increasing = false;
    }
    if (st.runs.size() >= 2)
    {
        auto const& a = st.runs[0];
        auto const& b = st.runs[1];
        st.kn_ratio = a.kn / b.kn;
        // Blocks past the earlier crossover that both runs resolve.
        double acc = 0;
        int cnt = 0;
        std::size_t start = std::min(a.crossover, b.crossover);
        for (std::size_t q = 0; q < std::min(a.block_k.size(), b.block_k.size()); ++q)
            if (a.block_k[q] >= static_cast<double>(start))
            {
                acc += std::log(a.block_tau[q] / b.block_tau[q]);
                ++cnt;
            }
        st.tail_ratio = cnt > 0 ? std::exp(acc / cnt)
                                : std::numeric_limits<double>::quiet_NaN();
    }
    if (!st.runs.empty() && st.runs[0].has_tail)
    {
        st.tail_exponent = -st.runs[0].tail.slope;
        st.gap_volume = st.tail_exponent * 3;
        st.gap_boundary = st.tail_exponent * 2;
    }
    return st;
}

}  // namespace knt
