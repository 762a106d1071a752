#include "knt/remainder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "knt/error.hpp"
#include "knt/fit.hpp"
#include "knt/parallel.hpp"

namespace knt
{
double ExpansionTerms::psi1(Vec3 const& x, Vec3 const& v) const
{
    return -v.dot(fields.psi0.gradient(x)) + fields.c.value(x);
}

double ExpansionTerms::psia1(Vec3 const& x, Vec3 const& v) const
{
    return -v.dot(fields.rhoa0.gradient(x)) + fields.ca.value(x);
}

Vec3 ExpansionTerms::flux_psi1(Vec3 const& x) const
{
    return -diffusion_coefficient(3) * fields.psi0.gradient(x);
}

ExpansionTerms expansion_terms(BoundaryData const& f,
                               AbsorptionField const& sigma, double kn)
{
    if (!(kn > 0) || kn > 1)
        throw ArgumentError("expansion_terms: Kn must lie in (0, 1]");
    ExpansionTerms t;
    t.kn = kn;
    t.fields = expansion_fields(f, sigma);
    return t;
}

//---------------------------------------------------------------------------//
namespace
{
std::vector<Vec3> seeded_directions(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<Vec3> dirs;
    while (static_cast<int>(dirs.size()) < n)
    {
        Vec3 g(N(rng), N(rng), N(rng));
        if (g.norm() > 1e-8)
            dirs.push_back(g.normalized());
    }
    return dirs;
}

double band_width(double kn, RemainderOptions const& o)
{
    return std::min(o.band * kn, 0.5);
}

bool small(double numerator, double value, double tol)
{
    return std::abs(numerator) < 10 * tol * std::max(1.0, std::abs(value));
}
}  // namespace

std::vector<Vec3> remainder_sample_set(double kn, RemainderOptions const& opts)
{
    if (opts.n_radii < 2 || opts.n_directions < 1 || !(opts.band > 0))
        throw ConfigError("remainder_sample_set: invalid sampling controls");
    int n_layer = opts.n_radii / 2, n_bulk = opts.n_radii - n_layer;
    double w = band_width(kn, opts);
    std::vector<double> radii;
    // Layer depths geometric from w/250 to just inside the band.
    double d0 = w / 250, d1 = 0.95 * w;
    for (int i = 0; i < n_layer; ++i)
        radii.push_back(1 - d0 * std::pow(d1 / d0, n_layer > 1 ? double(i) / (n_layer - 1) : 0.0));
    for (int i = 0; i < n_bulk; ++i)
        radii.push_back((i + 0.5) / n_bulk * (1 - w));
    auto dirs = seeded_directions(opts.n_directions, opts.seed);
    std::vector<Vec3> pts;
    for (double r : radii)
        for (auto const& d : dirs)
            pts.push_back(r * d);
    return pts;
}

RemainderRun remainder_fields(BoundaryData const& f, AbsorptionField const& sigma,
                              double kn, RemainderOptions const& opts)
{
    auto const& to = opts.transport;
    ExpansionTerms terms = expansion_terms(f, sigma, kn);
    TransportSolution ua = solve_mean_intensity(f, kn, sigma, {}, to);
    TransportSolution u0 = solve_mean_intensity(f, kn, AbsorptionField(), {}, to);
    bool same = sigma.is_zero();
    double w = band_width(kn, opts);
    double kn2 = kn * kn;

    RemainderRun run;
    run.kn = kn;
    auto pts = remainder_sample_set(kn, opts);
    run.samples.resize(pts.size());
    parallel_for(
        pts.size(),
        [&](std::size_t i) {
            RemainderSample& s = run.samples[i];
            s.x = pts[i];
            s.depth = 1 - s.x.norm();
            s.layer = s.depth < w;
            double mean = ua.mean(s.x);
            double num = mean - terms.fields.rhoa0.value(s.x)
                         - kn * terms.fields.ca.value(s.x);
            s.mean_usable = !small(num, mean, to.tol);
            s.Ra = num / kn2;
            if (!opts.flux)
            {
                s.flux_usable = false;
                return;
            }
            Vec3 du = Vec3::Zero();
            if (!same)
                du = reconstruct_moments(ua, s.x).flux
                     - reconstruct_moments(u0, s.x).flux;
            Vec3 fnum = du - kn * terms.flux_psi1(s.x);
            s.flux_usable = !small(fnum.norm(), du.norm(), to.tol);
            s.vR = fnum / kn2;
        },
        to.threads);

    for (auto const& s : run.samples)
    {
        if (s.mean_usable)
        {
            double a = std::abs(s.Ra);
            (s.layer ? run.ra_layer : run.ra_bulk)
                = std::max(s.layer ? run.ra_layer : run.ra_bulk, a);
        }
        else
            ++run.unusable;
        if (s.flux_usable)
        {
            double a = s.vR.norm();
            (s.layer ? run.vr_layer : run.vr_bulk)
                = std::max(s.layer ? run.vr_layer : run.vr_bulk, a);
        }
        else if (opts.flux)
            ++run.unusable;
    }
    run.ra_max = std::max(run.ra_bulk, run.ra_layer);
    run.vr_max = std::max(run.vr_bulk, run.vr_layer);
    return run;
}

RemainderReport remainder_sweep(BoundaryData const& f,
                                AbsorptionField const& sigma,
                                std::vector<double> const& kn_list,
                                RemainderOptions const& opts)
{
    if (kn_list.size() < 2)
        throw ArgumentError("remainder_sweep: need two or more Kn values");
    RemainderReport rep;
    double r_K = sigma.is_zero() ? 0.5 : sigma.r_support();
    ExpansionFields e0 = expansion_fields(f, AbsorptionField());
    rep.rho_norm = interior_sobolev_norm(e0.rho00, r_K, rep.s0);
    rep.f_norm = f.hs_norm(rep.s1);
    std::vector<double> kns;
    for (double kn : kn_list)
    {
        rep.runs.push_back(remainder_fields(f, sigma, kn, opts));
        double den = rep.rho_norm + kn * rep.f_norm;
        rep.normalized_ra.push_back(kn * kn * rep.runs.back().ra_max / den);
        rep.normalized_vr.push_back(kn * rep.runs.back().vr_max / den);
        kns.push_back(kn);
    }
    std::vector<double> inv;
    for (double kn : kns)
        inv.push_back(1 / kn);
    auto summarize = [&](std::vector<double> const& v, double& slope,
                         double& spread) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        if (*lo > 0)
        {
            slope = loglog_slope(inv, v);
            spread = *hi / *lo;
        }
        else
        {
            slope = 0;
            spread = *hi > 0 ? INFINITY : 1.0;
        }
    };
    summarize(rep.normalized_ra, rep.drift_ra, rep.spread_ra);
    if (opts.flux)
        summarize(rep.normalized_vr, rep.drift_vr, rep.spread_vr);
    return rep;
}

//---------------------------------------------------------------------------//
namespace
{
struct ExpFit
{
    double A{0}, B{0}, sse{INFINITY};
};

// Relative least squares of A exp(-beta z)/Kn + B for fixed beta, A, B >= 0.
ExpFit fit_fixed_beta(std::vector<LayerBin> const& bins, double kn, double beta)
{
    double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
    for (auto const& b : bins)
    {
        double w = 1 / (b.value * b.value);
        double p = std::exp(-beta * b.z) / kn;
        s11 += w * p * p;
        s12 += w * p;
        s22 += w;
        t1 += w * p * b.value;
        t2 += w * b.value;
    }
    auto sse = [&](double A, double B) {
        double acc = 0;
        for (auto const& b : bins)
        {
            double r = (A * std::exp(-beta * b.z) / kn + B - b.value) / b.value;
            acc += r * r;
        }
        return acc;
    };
    ExpFit best;
    double det = s11 * s22 - s12 * s12;
    if (det > 0)
    {
        double A = (t1 * s22 - t2 * s12) / det, B = (s11 * t2 - s12 * t1) / det;
        if (A >= 0 && B >= 0)
            best = {A, B, sse(A, B)};
    }
    ExpFit a{t1 / s11, 0, 0}, b{0, t2 / s22, 0};
    a.sse = sse(a.A, 0);
    b.sse = sse(0, b.B);
    for (auto const& c : {a, b})
        if (c.sse < best.sse)
            best = c;
    return best;
}
}  // namespace

LayerProfileReport layer_profile_check(BoundaryData const& f, double kn,
                                       RemainderOptions const& opts)
{
    auto const& to = opts.transport;
    ExpansionFields e = expansion_fields(f, AbsorptionField());
    TransportSolution u0 = solve_mean_intensity(f, kn, AbsorptionField(), {}, to);

    // Depths geometric in z = d/Kn from 0.02 to 30 (capped by the center).
    int n_depth = 2 * opts.n_radii;
    double z0 = 0.02, z1 = std::min(30.0, 0.98 / kn);
    auto dirs = seeded_directions(opts.n_directions, opts.seed);
    std::vector<double> zs;
    for (int i = 0; i < n_depth; ++i)
        zs.push_back(z0 * std::pow(z1 / z0, double(i) / (n_depth - 1)));

    // Bin edges: geometric, four per decade.
    std::vector<double> edges;
    for (double z = z0; z < z1 * 1.0001; z *= std::pow(10.0, 0.25))
        edges.push_back(z);
    edges.push_back(z1 * 1.0001);
    LayerProfileReport rep;
    rep.kn = kn;
    std::vector<LayerBin> bins(edges.size() - 1);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b)
        bins[b].z = std::sqrt(edges[b] * edges[b + 1]);
    double floor = 10 * to.tol / (kn * kn);
    for (double z : zs)
    {
        double r = 1 - z * kn;
        std::size_t b = std::upper_bound(edges.begin(), edges.end(), z)
                        - edges.begin() - 1;
        b = std::min(b, bins.size() - 1);
        for (auto const& d : dirs)
        {
            Vec3 x = r * d;
            double R = (u0.mean(x) - e.rho00.value(x) - kn * e.c0.value(x))
                       / (kn * kn);
            bins[b].value = std::max(bins[b].value, std::abs(R));
            ++bins[b].count;
            if (z <= 2)
                rep.near_max = std::max(rep.near_max, std::abs(R));
            if (z > 10)
                rep.tail_max = std::max(rep.tail_max, std::abs(R));
        }
    }
    int near = 0;
    for (auto const& b : bins)
        near += b.count > 0 && b.z < opts.band;
    if (near < 4)
        throw ConfigError("layer_profile_check: fewer than four sampled bins in the layer band");
    for (auto const& b : bins)
        if (b.count > 0 && b.value > floor)
            rep.bins.push_back(b);
    if (rep.bins.size() < 3)
    {
        rep.flat = true;
        return rep;
    }

    // Coarse scan then golden refinement of beta.
    auto obj = [&](double beta) { return fit_fixed_beta(rep.bins, kn, beta).sse; };
    double best = 0.05, bv = obj(best);
    for (double beta = 0.05; beta <= 8.0; beta *= 1.1)
        if (double v = obj(beta); v < bv)
        {
            bv = v;
            best = beta;
        }
    double a = best / 1.1, b = best * 1.1;
    double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 60; ++it)
    {
        double c = b - g * (b - a), d = a + g * (b - a);
        if (obj(c) < obj(d))
            b = d;
        else
            a = c;
    }
    rep.beta = 0.5 * (a + b);
    ExpFit fit = fit_fixed_beta(rep.bins, kn, rep.beta);
    rep.A = fit.A;
    rep.B = fit.B;
    return rep;
}

//---------------------------------------------------------------------------//
DiffusionStudy diffusion_limit_study(BoundaryData const& f,
                                     AbsorptionField const& sigma,
                                     std::vector<double> const& kn_list,
                                     double r_K, RemainderOptions const& opts)
{
    if (!(r_K > 0) || r_K >= 1)
        throw ArgumentError("diffusion_limit_study: r_K must lie in (0, 1)");
    ExpansionFields e = expansion_fields(f, sigma);
    auto dirs = seeded_directions(opts.n_directions, opts.seed);
    DiffusionStudy st;
    std::vector<double> kns, errs;
    for (double kn : kn_list)
    {
        TransportSolution sol = solve_mean_intensity(f, kn, sigma, {}, opts.transport);
        DiffusionRow row;
        row.kn = kn;
        for (int i = 0; i < opts.n_radii; ++i)
        {
            double r = r_K * (i + 0.5) / opts.n_radii;
            for (auto const& d : dirs)
            {
                Vec3 x = r * d;
                row.error = std::max(row.error,
                                     std::abs(sol.mean(x) - e.rhoa0.value(x)));
            }
        }
        st.rows.push_back(row);
        kns.push_back(kn);
        errs.push_back(row.error);
    }
    if (kns.size() >= 2)
        st.rate = loglog_slope(kns, errs);
    return st;
}

}  // namespace knt
