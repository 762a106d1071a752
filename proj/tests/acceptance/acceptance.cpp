// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "knt/albedo.hpp"
#include "knt/elliptic.hpp"
#include "knt/instability.hpp"
#include "knt/layer1d.hpp"
#include "knt/remainder.hpp"
#include "knt/runner.hpp"
#include "knt/specfun.hpp"
#include "knt/transport.hpp"
#include "oracles.hpp"

using namespace knt;

namespace
{
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, char const* name, bool pass, std::string const& detail)
{
    std::printf("%s [%2d] %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

BoundaryData l1_mode()
{
    return BoundaryData::mode(3, harmonic_index(3, 1, 0));
}

Vec3 random_point(std::mt19937_64& rng, double rmax)
{
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> u(0, 1);
    Vec3 g(n(rng), n(rng), n(rng));
    return rmax * std::cbrt(u(rng)) * g.normalized();
}

//---------------------------------------------------------------------------//
void kernel_moments_exact()
{
    auto t0 = Clock::now();
    auto m = kernel_moments();
    double dev = std::max({std::abs(m.m0_plus - 0.5), std::abs(m.m1_plus - 0.25),
                           std::abs(m.m2_plus - 1.0 / 3), std::abs(m.m_total - 1.0)});
    double t = seconds_since(t0);
    report(1, "kernel moments", dev <= 1e-9 && t < 1.0,
           fmt("max deviation %.2e (tol 1e-9), %.3f s (< 1 s)", dev, t));
}

void layer_constants()
{
    auto t0 = Clock::now();
    auto a = compute_layer_constants(2000, 40.0);
    auto b = compute_layer_constants(4000, 40.0);
    double t = seconds_since(t0);
    double wmin = 1e300;
    for (auto const* c : {&a, &b})
        for (auto const* s : {&c->w1, &c->w2})
            for (double w : s->w)
                wmin = std::min(wmin, w);
    // w2 is identically flat, so only w1 carries a measurable decay rate.
    double rate = b.w1.decay_rate;
    double rel = std::abs(a.ratio - b.ratio) / std::abs(b.ratio);
    bool pass = wmin >= 0 && rate >= 0.45 && rate <= 0.55 && rel <= 5e-4 && t < 30;
    report(2, "layer constants", pass,
           fmt("min w %.3g (>= 0), decay rate %.4f (in [0.45, 0.55]), W1/W2 %.7f vs "
               "%.7f rel %.1e (3 digits), %.1f s (< 30 s)",
               wmin, rate, a.ratio, b.ratio, rel, t));
}

void constant_solution()
{
    auto t0 = Clock::now();
    std::mt19937_64 rng(3);
    double err = 0, col = 0;
    for (double kn : {0.1, 0.05})
    {
        auto sol = solve_mean_intensity(BoundaryData::constant(3, 1.0), kn, AbsorptionField());
        for (int i = 0; i < 200; ++i)
            err = std::max(err, std::abs(sol.mean(random_point(rng, 0.999)) - 1));
        auto A = assemble_albedo(AbsorptionField(), kn, 16);
        col = std::max(col, A.M.col(0).cwiseAbs().maxCoeff());
    }
    double t = seconds_since(t0);
    report(3, "constant-solution exactness", err <= 1e-6 && col <= 1e-5 && t < 120,
           fmt("sup |<u> - 1| %.2e (<= 1e-6), albedo column %.2e (<= 1e-5), %.1f s", err,
               col, t));
}

void maximum_principle()
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    int mass_viol = 0;
    double mass_max = 0;
    for (int i = 0; i < 100; ++i)
    {
        double kn = 0.05 + 0.45 * u(rng);
        auto sigma = AbsorptionField::bump(20 * u(rng), 0.2 + 0.6 * u(rng));
        double m = kernel_mass(random_point(rng, 0.999), kn, sigma);
        mass_max = std::max(mass_max, m);
        mass_viol += m > 1 ? 1 : 0;
    }
    int viol = 0;
    double worst_low = 1e300, worst_high = -1e300;
    for (int p = 0; p < 20; ++p)
    {
        double kn = 0.05 + 0.45 * u(rng);
        auto sigma = AbsorptionField::bump(20 * u(rng), 0.2 + 0.6 * u(rng));
        Eigen::VectorXd c = Eigen::VectorXd::Zero(9);
        for (int k = 1; k < 9; ++k)
            c[k] = 0.6 * (u(rng) - 0.5);
        c[0] = 1.0;
        BoundaryData f(3, c);
        double fmin = f.sampled_min(128);
        if (fmin < 0)
        {
            c[0] += (-fmin + 0.01) * std::sqrt(4 * std::numbers::pi);
            f = BoundaryData(3, c);
        }
        double fmax = f.sampled_max(256);
        auto sol = solve_mean_intensity(f, kn, sigma);
        for (int i = 0; i < 25; ++i)
        {
            double v = sol.mean(random_point(rng, 0.999));
            worst_low = std::min(worst_low, v);
            worst_high = std::max(worst_high, v - fmax);
            if (v < 0 || v > fmax)
                ++viol;
        }
    }
    report(4, "maximum principle", mass_viol == 0 && viol == 0,
           fmt("kernel mass max %.6f, %d violations; <u> min %.3g, max(<u> - max f) %.3g, "
               "%d violations",
               mass_max, mass_viol, worst_low, worst_high, viol));
}

void elliptic_oracle()
{
    double dtn = 0;
    for (int l = 0; l <= 8; ++l)
    {
        double v = dtn_mode(l, AbsorptionField());
        dtn = std::max(dtn, l == 0 ? std::abs(v) : std::abs(v - l) / l);
    }
    auto bump = AbsorptionField::bump(10, 0.6);
    double sh = 0;
    for (int l : {0, 1, 2, 3, 4})
    {
        auto sol = solve_mode(l, bump, 1.0);
        oracle::Shooting s{l, bump, {}, 1.0};
        for (double r : {0.1, 0.35, 0.55, 0.8, 1.0})
        {
            double ref = std::pow(r, l) * s.at(r)[0];
            sh = std::max(sh, std::abs(sol.value(r) - ref) / std::abs(ref));
        }
        auto e = s.at(1.0);
        double ref = l * e[0] + e[1];
        sh = std::max(sh, std::abs(dtn_mode(l, bump) - ref) / std::max(1.0, std::abs(ref)));
    }
    report(5, "elliptic oracle", dtn <= 1e-6 && sh <= 1e-6,
           fmt("DtN = l rel err %.2e (<= 1e-6), bump vs shooting %.2e (<= 1e-6)", dtn, sh));
}

void diffusion_limit()
{
    auto st = diffusion_limit_study(l1_mode(), AbsorptionField(), {0.2, 0.1, 0.05});
    std::string rows;
    for (auto const& r : st.rows)
        rows += fmt(" %.3g", r.error);
    report(6, "diffusion limit", st.rate >= 0.8,
           fmt("errors%s, fitted rate %.3f (>= 0.8)", rows.c_str(), st.rate));
}

void remainder_scalings()
{
    auto t0 = Clock::now();
    auto bump = AbsorptionField::bump(10, 0.6);
    auto rep = remainder_sweep(l1_mode(), bump, {0.2, 0.1, 0.05});
    auto a = layer_profile_check(l1_mode(), 0.05);
    auto b = layer_profile_check(l1_mode(), 0.025);
    double t = seconds_since(t0);
    // Bounded bulk constant: B does not grow by more than 2 as Kn halves.
    bool bounded = std::isfinite(a.B) && std::isfinite(b.B) && b.B <= 2 * a.B;
    bool pass = rep.spread_ra <= 2 && rep.spread_vr <= 2 && rep.drift_ra <= 0.2
                && rep.drift_vr <= 0.2 && a.beta >= 0.4 && b.beta >= 0.4 && bounded;
    report(7, "remainder scalings", pass,
           fmt("spread R_a %.2f, vR %.2f (<= 2); drift %.3f, %.3f (<= 0.2); layer beta "
               "%.2f, %.2f (>= 0.4); B %.3f -> %.3f; %.0f s",
               rep.spread_ra, rep.spread_vr, rep.drift_ra, rep.drift_vr, a.beta, b.beta,
               a.B, b.B, t));
}

void albedo_identities()
{
    auto bump = AbsorptionField::bump(10, 0.6);
    AlbedoOptions o;
    o.transport.mu_per_panel = 3;
    o.transport.n_azimuth = 8;
    auto w1 = weak_form_check(bump, 0.2, l1_mode(), l1_mode(), 1, o);
    auto w2 = weak_form_check(bump, 0.2, l1_mode(), l1_mode(), 2, o);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd a(9), b(9);
    for (int k = 0; k < 9; ++k)
    {
        a[k] = u(rng);
        b[k] = u(rng);
    }
    auto j1 = adjoint_check(bump, 0.2, l1_mode(), l1_mode());
    auto j2 = adjoint_check(bump, 0.1, BoundaryData(3, a), BoundaryData(3, b));
    double adj = std::max(j1.residual, j2.residual);
    bool pass = w1.residual <= 5e-3 && w2.residual < w1.residual && adj <= 5e-3;
    report(8, "albedo identities", pass,
           fmt("weak form %.2e -> %.2e under refinement (<= 5e-3, decreasing), adjoint "
               "%.2e (<= 5e-3)",
               w1.residual, w2.residual, adj));
}

void albedo_apriori()
{
    auto s = albedo_apriori_sweep(AbsorptionField::bump(10, 0.6), l1_mode(), {0.2, 0.1, 0.05});
    std::string cs;
    for (auto const& r : s.rows)
        cs += fmt(" %.3g", r.C);
    report(9, "albedo a priori sweep", s.spread <= 2,
           fmt("C(Kn)%s, spread %.2f (<= 2)", cs.c_str(), s.spread));
}

void entropy_machinery()
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> lu(-8, 1);
    int order = 0;
    for (int trial = 0; trial < 10000; ++trial)
    {
        std::vector<double> v(1 + trial % 40);
        for (double& x : v)
            x = std::exp(lu(rng));
        std::sort(v.begin(), v.end(), std::greater<>());
        auto e = entropy_bounds_from_spectrum(SingularSpectrum(v), std::exp(lu(rng)));
        order += e.lower <= e.upper ? 0 : 1;
    }
    int sandwich = 0, n_sandwich = 0;
    for (auto const& [axes, t] : std::vector<std::pair<std::vector<double>, double>>{
             {{1, 1, 1}, 1.1},
             {{1, 0.5}, 0.2},
             {{1, 1e-7}, 0.1},
             {{1, 0.7, 0.4}, 0.3},
             {{1, 0.8, 0.5, 0.3}, 0.4}})
    {
        ++n_sandwich;
        sandwich += sandwich_validation(axes, t).passed() ? 0 : 1;
    }
    long mismatch = 0;
    for (auto const& s : {SingularSpectrum::exponential(1.0, 200),
                          SingularSpectrum::polynomial(8.0, 200)})
        for (double t : {1e-1, 1e-3, 1e-6, 1e-9, 1e-12})
        {
            auto b = comparison_upper_bound(s, t);
            std::size_t brute = 0;
            for (double x : s.values())
                for (double y : s.values())
                    if (std::pow(x, 0.25) * std::pow(y, 0.25) >= b.threshold)
                        ++brute;
            mismatch += std::abs(long(brute) - long(b.m));
        }
    auto sp = singular_sum_property(1000, 20, 20, 20);
    int orth = 0;
    for (int m = 1; m <= 6; ++m)
        for (double t : {0.35, 0.5})
            orth += nonneg_cover_lower(m, t).holds() ? 0 : 1;
    orth += nonneg_cover_lower(3, 0.2).holds() ? 0 : 1;
    bool pass = order == 0 && sandwich == 0 && mismatch == 0 && sp.violations == 0 && orth == 0;
    report(10, "entropy machinery", pass,
           fmt("order violations %d/10000, sandwich failures %d/%d, pair-count mismatch "
               "%ld, singular-sum violations %d/1000 trials, orthant failures %d",
               order, sandwich, n_sandwich, mismatch, sp.violations, orth));
}

void modulus_figure1()
{
    double dual = 0, cont = 0;
    for (double kn : {1e-8, 1e-4, 1e-2})
    {
        ModulusParams p;
        p.kn = kn;
        for (double t = 1e-30; t < 0.9; t *= 1.5)
        {
            double a = modulus_lower_bound(t, p).omega;
            dual = std::max(dual, std::abs(a - modulus_lower_bound_via_g(t, p)) / a);
        }
        auto row = crossover_point(p);
        auto v = modulus_lower_bound(row.t_star, p);
        cont = std::max(cont, std::abs(v.holder - v.log) / v.log);
    }
    std::vector<double> kns;
    for (int e = -8; e <= -2; ++e)
        for (double m : {1.0, 2.0, 5.0})
            if (e < -2 || m == 1.0)
                kns.push_back(m * std::pow(10.0, e));
    ModulusParams p;
    auto st = transition_study(kns, p);
    ModulusParams q = p;
    q.C2 = 2 * p.C2;
    auto st2 = transition_study(kns, q);
    double shift = std::abs(st2.beta - st.beta);
    bool pass = dual <= 1e-12 && cont <= 1e-12 && st.increasing && st.beta_spread <= 0.02
                && st.beta >= 0.10 && st.beta <= 0.15 && shift < 0.01;
    report(11, "modulus curve", pass,
           fmt("dual gap %.1e (<= 1e-12), branch gap at t* %.1e, t* increasing %s, beta "
               "%.4f (raw %.4f) window spread %.1e (<= 0.02), C2 doubling shift %.1e (< 0.01)",
               dual, cont, st.increasing ? "yes" : "no", st.beta, st.beta_raw,
               st.beta_spread, shift));
}

void svd_transition()
{
    auto t0 = Clock::now();
    auto st = albedo_svd_study(AbsorptionField::bump(10, 0.6), AbsorptionField(),
                               {0.2, 0.1, 0.05});
    double t_study = seconds_since(t0);
    bool concave = true;
    std::string cross;
    for (auto const& r : st.runs)
    {
        concave = concave && r.head_concave;
        cross += fmt(" %zu", r.crossover);
    }
    double rel = st.tail_ratio / st.kn_ratio;
    bool tail = std::isfinite(rel) && std::abs(rel - 1) <= 0.3;

    auto t1 = Clock::now();
    std::ostringstream sink;
    auto checks = run_selftest(ExperimentConfig::defaults(), sink);
    double t_self = seconds_since(t1);
    bool self_ok = true;
    for (auto const& c : checks)
        self_ok = self_ok && c.passed;

    bool pass = concave && tail && st.crossover_increasing && t_self <= 900 && self_ok;
    report(12, "svd transition", pass,
           fmt("head concave %s; tail ratio %.3f vs Kn ratio %.1f (within 30%%: %s); "
               "crossover k%s increasing %s; study %.0f s; selftest %s in %.0f s (<= 900 s)",
               concave ? "yes" : "no", st.tail_ratio, st.kn_ratio, tail ? "yes" : "no",
               cross.c_str(), st.crossover_increasing ? "yes" : "no", t_study,
               self_ok ? "passed" : "failed", t_self));
}
}  // namespace

int main()
{
    struct Item
    {
        int id;
        void (*run)();
    };
    for (auto [id, run] : {Item{1, kernel_moments_exact}, Item{2, layer_constants},
                           Item{3, constant_solution}, Item{4, maximum_principle},
                           Item{5, elliptic_oracle}, Item{6, diffusion_limit},
                           Item{7, remainder_scalings}, Item{8, albedo_identities},
                           Item{9, albedo_apriori}, Item{10, entropy_machinery},
                           Item{11, modulus_figure1}, Item{12, svd_transition}})
    {
        try
        {
            run();
        }
        catch (std::exception const& e)
        {
            report(id, "exception", false, e.what());
        }
    }
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
