//---------------------------------------------------------------------------//
/*!
 * \file runner.cpp
 */
//---------------------------------------------------------------------------//
#include "knt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>

#include <json.hpp>

#include "knt/albedo.hpp"
#include "knt/elliptic.hpp"
#include "knt/error.hpp"
#include "knt/instability.hpp"
#include "knt/io.hpp"
#include "knt/layer1d.hpp"
#include "knt/parallel.hpp"
#include "knt/remainder.hpp"
#include "knt/specfun.hpp"
#include "knt/transport.hpp"

namespace knt
{
namespace
{
using json = nlohmann::ordered_json;

struct Context
{
    ExperimentConfig const& cfg;
    std::ostream& log;
    std::string dir;

    std::string path(std::string const& name) const
    {
        return (std::filesystem::path(dir) / name).string();
    }
    void write_csv(std::string const& name, CsvTable const& t) const
    {
        t.write(path(name));
        log << "wrote " << path(name) << " (" << t.num_rows() << " rows)\n";
    }
    void write_json(std::string const& name, json const& j) const
    {
        write_file_atomic(path(name), j.dump(2) + "\n");
    }
    json meta(std::string const& command) const
    {
        json j;
        j["command"] = command;
        j["config"] = json::object();
        for (auto const& [k, v] : cfg.values())
            j["config"][k] = v;
        return j;
    }
};

//---------------------------------------------------------------------------//
void cmd_layer_constants(Context const& ctx)
{
    int n = ctx.cfg.integer("layer.n");
    double ymax = ctx.cfg.number("layer.ymax");
    if (n < 10 || !(ymax > 0))
        throw ConfigError("layer.n >= 10 and layer.ymax > 0 required");
    auto c = compute_layer_constants(n, ymax);
    CsvTable t({"n", "ymax", "W1", "W2", "ratio", "decay_rate_w1", "decay_rate_w2"});
    t.add_row({double(c.n), c.ymax, c.W1, c.W2, c.ratio, c.w1.decay_rate,
               c.w2.decay_rate});
    ctx.write_csv("layer_constants.csv", t);
    CsvTable p({"y", "w1", "w2"});
    for (std::size_t k = 0; k < c.w1.grid.y.size(); ++k)
        p.add_row({c.w1.grid.y[k], c.w1.w[k], c.w2.w[k]});
    ctx.write_csv("layer_profiles.csv", p);
    json j = ctx.meta("layer-constants");
    j["residual_w1"] = c.w1.residual;
    j["residual_w2"] = c.w2.residual;
    ctx.write_json("layer_constants.json", j);
}

void cmd_transport_solve(Context const& ctx)
{
    auto sigma = config_absorption(ctx.cfg);
    auto f = config_datum(ctx.cfg);
    double kn = config_kn(ctx.cfg);
    auto opts = config_transport(ctx.cfg);
    int n_out = ctx.cfg.integer("transport.n_out");
    if (n_out < 2)
        throw ConfigError("transport.n_out must be >= 2");
    auto sol = solve_mean_intensity(f, kn, sigma, {}, opts);
    CsvTable t({"axis", "r", "x", "y", "z", "mean"});
    for (int axis = 0; axis < 3; ++axis)
        for (int i = 0; i < n_out; ++i)
        {
            double r = double(i) / (n_out - 1);
            Vec3 x = Vec3::Zero();
            x[axis] = r;
            t.add_row({double(axis), r, x[0], x[1], x[2], sol.mean(x)});
        }
    ctx.write_csv("mean_intensity.csv", t);
    json j = ctx.meta("transport-solve");
    j["residual"] = sol.residual;
    for (auto const& [l, m] : sol.modes)
        j["modes"].push_back({{"l", l},
                              {"residual", m.residual},
                              {"iterations", m.iterations},
                              {"direct", m.used_direct}});
    ctx.write_json("mean_intensity.json", j);
}

void cmd_albedo_assemble(Context const& ctx)
{
    auto sigma = config_absorption(ctx.cfg);
    double kn = config_kn(ctx.cfg);
    int n_b = ctx.cfg.integer("basis.n_modes");
    if (n_b < 1)
        throw ConfigError("basis.n_modes must be positive");
    std::string route = ctx.cfg.text("albedo.route");
    AlbedoMatrix A;
    if (route == "projection")
    {
        AlbedoOptions o;
        o.transport = config_transport(ctx.cfg);
        A = assemble_albedo(sigma, kn, n_b, o);
    }
    else if (route == "per-degree")
        A = assemble_albedo_modal(sigma, kn, n_b, config_transport(ctx.cfg));
    else
        throw ConfigError("albedo.route must be 'projection' or 'per-degree'");
    CsvTable t({"j", "k", "l_j", "l_k", "value"});
    for (int j = 0; j < A.size(); ++j)
        for (int k = 0; k < A.size(); ++k)
            t.add_row({double(j), double(k), double(A.degree[j]), double(A.degree[k]),
                       A.M(j, k)});
    ctx.write_csv("albedo_matrix.csv", t);
    json m = ctx.meta("albedo-assemble");
    m["route"] = A.route;
    m["sigma"] = A.sigma_descriptor;
    m["kn"] = A.kn;
    ctx.write_json("albedo_matrix.json", m);
}

void cmd_diffusion_verify(Context const& ctx)
{
    auto sigma = config_absorption(ctx.cfg);
    auto f = config_datum(ctx.cfg);
    auto kns = config_kn_list(ctx.cfg);
    RemainderOptions o;
    o.n_radii = ctx.cfg.integer("remainder.n_radii");
    o.n_directions = ctx.cfg.integer("remainder.n_directions");
    o.seed = static_cast<std::uint64_t>(ctx.cfg.number("seed"));
    o.transport = config_transport(ctx.cfg);
    double r_k = ctx.cfg.number("remainder.r_k");
    if (!(r_k > 0 && r_k < 1))
        throw ConfigError("remainder.r_k must lie in (0, 1)");

    auto rep = remainder_sweep(f, sigma, kns, o);
    CsvTable t({"kn", "ra_bulk", "ra_layer", "vr_bulk", "vr_layer", "normalized_ra",
                "normalized_vr", "unusable"});
    for (std::size_t i = 0; i < rep.runs.size(); ++i)
    {
        auto const& r = rep.runs[i];
        t.add_row({r.kn, r.ra_bulk, r.ra_layer, r.vr_bulk, r.vr_layer,
                   rep.normalized_ra[i], rep.normalized_vr[i], double(r.unusable)});
    }
    ctx.write_csv("remainder.csv", t);

    auto ds = diffusion_limit_study(f, sigma, kns, r_k, o);
    CsvTable d({"kn", "error"});
    for (auto const& r : ds.rows)
        d.add_row({r.kn, r.error});
    ctx.write_csv("diffusion.csv", d);

    json j = ctx.meta("diffusion-verify");
    j["rho_norm"] = rep.rho_norm;
    j["f_norm"] = rep.f_norm;
    j["drift_ra"] = rep.drift_ra;
    j["drift_vr"] = rep.drift_vr;
    j["spread_ra"] = rep.spread_ra;
    j["spread_vr"] = rep.spread_vr;
    j["diffusion_rate"] = ds.rate;
    ctx.write_json("diffusion_verify.json", j);
}

void cmd_svd_study(Context const& ctx)
{
    auto sigma = config_absorption(ctx.cfg);
    auto kns = config_kn_list(ctx.cfg);
    auto o = default_svd_options();
    o.s = ctx.cfg.number("svd.s");
    o.max_degree = ctx.cfg.integer("svd.max_degree");
    o.transport = config_transport(ctx.cfg);
    o.refined = o.transport;
    o.refined.mu_per_panel *= 2;
    o.refined.t_per_panel *= 2;
    if (o.s < 0 || o.max_degree < 1)
        throw ConfigError("svd.s >= 0 and svd.max_degree >= 1 required");
    auto st = albedo_svd_study(sigma, AbsorptionField(), kns, o);
    CsvTable sp({"kn", "k", "value", "refined", "usable"});
    CsvTable fits({"kn", "usable", "head_slope", "head_curvature", "head_concave",
                   "tail_slope", "has_tail", "crossover"});
    for (auto const& r : st.runs)
    {
        for (std::size_t k = 0; k < r.values.size(); ++k)
            sp.add_row({r.kn, double(k + 1), r.values[k], r.refined[k],
                        k < r.usable ? 1.0 : 0.0});
        fits.add_row({r.kn, double(r.usable), r.head.slope, r.head_curvature,
                      r.head_concave ? 1.0 : 0.0, r.tail.slope, r.has_tail ? 1.0 : 0.0,
                      double(r.crossover)});
    }
    ctx.write_csv("svd_spectra.csv", sp);
    ctx.write_csv("svd_fits.csv", fits);
    json j = ctx.meta("svd-study");
    j["tail_ratio"] = st.tail_ratio;
    j["kn_ratio"] = st.kn_ratio;
    j["crossover_increasing"] = st.crossover_increasing;
    j["tail_exponent"] = st.tail_exponent;
    j["gap_volume"] = st.gap_volume;
    j["gap_boundary"] = st.gap_boundary;
    ctx.write_json("svd_study.json", j);
}

void cmd_figure1(Context const& ctx)
{
    auto p = config_modulus(ctx.cfg);
    auto kns = config_kn_list(ctx.cfg, "figure1.kn_list");
    double t_min = ctx.cfg.number("figure1.t_min"), t_max = ctx.cfg.number("figure1.t_max");
    int n = ctx.cfg.integer("figure1.n");
    if (!(t_min > 0) || !(t_max > t_min) || n < 2)
        throw ConfigError("figure1: need 0 < t_min < t_max and n >= 2");
    std::string plot = "# t omega_lower (one block per Kn)\n";
    CsvTable tr({"kn", "t_star", "found"});
    for (std::size_t i = 0; i < kns.size(); ++i)
    {
        ModulusParams q = p;
        q.kn = kns[i];
        auto c = modulus_curve(q, t_min, t_max, n);
        CsvTable t({"t", "omega", "holder", "log", "regime"});
        plot += "# kn = " + format_double(q.kn) + "\n";
        for (std::size_t k = 0; k < c.t.size(); ++k)
        {
            auto v = modulus_lower_bound(c.t[k], q);
            t.add_row({c.t[k], v.omega, v.holder, v.log}, to_string(v.regime));
            plot += format_double(c.t[k]) + " " + format_double(v.omega) + "\n";
        }
        plot += "\n\n";
        ctx.write_csv("figure1_curve_" + std::to_string(i) + ".csv", t);
        auto row = crossover_point(q);
        tr.add_row({q.kn, row.t_star, row.found ? 1.0 : 0.0});
    }
    ctx.write_csv("figure1_transition.csv", tr);
    write_file_atomic(ctx.path("figure1_plot.dat"), plot);

    json j = ctx.meta("figure1");
    double lo = *std::min_element(kns.begin(), kns.end());
    double hi = *std::max_element(kns.begin(), kns.end());
    if (kns.size() >= 2 && hi / lo >= 1e3 * (1 - 1e-12))
    {
        auto st = transition_study(kns, p);
        j["beta"] = st.beta;
        j["beta_raw"] = st.beta_raw;
        j["beta_spread"] = st.beta_spread;
        j["t_star_increasing"] = st.increasing;
    }
    else
        j["note"] = "Kn list spans fewer than three decades; no exponent fit";
    ctx.write_json("figure1.json", j);
}

void cmd_selftest(Context const& ctx)
{
    auto checks = run_selftest(ctx.cfg, ctx.log);
    CsvTable t({"value", "passed", "check"});
    bool ok = true;
    for (auto const& c : checks)
    {
        t.add_row({c.value, c.passed ? 1.0 : 0.0}, c.name);
        ok = ok && c.passed;
    }
    ctx.write_csv("selftest.csv", t);
    if (!ok)
        throw NumericalError("selftest: invariant checks failed");
}

using Command = std::function<void(Context const&)>;

std::map<std::string, std::pair<Command, std::string>> const& registry()
{
    static std::map<std::string, std::pair<Command, std::string>> const r{
        {"layer-constants",
         {cmd_layer_constants,
          "Plateau constants W1, W2 of the half-line layer problems.\n"
          "  layer_constants.csv: n,ymax,W1,W2,ratio,decay_rate_w1,decay_rate_w2\n"
          "  layer_profiles.csv: y,w1,w2"}},
        {"transport-solve",
         {cmd_transport_solve,
          "Mean intensity <u> for the configured datum, sigma_a and kn.value.\n"
          "  mean_intensity.csv: axis,r,x,y,z,mean (samples along the three axes)"}},
        {"albedo-assemble",
         {cmd_albedo_assemble,
          "Albedo matrix on basis.n_modes spherical harmonics (albedo.route).\n"
          "  albedo_matrix.csv: j,k,l_j,l_k,value"}},
        {"diffusion-verify",
         {cmd_diffusion_verify,
          "Remainder sweep and diffusion-limit error over kn.list.\n"
          "  remainder.csv: kn,ra_bulk,ra_layer,vr_bulk,vr_layer,normalized_ra,"
          "normalized_vr,unusable\n"
          "  diffusion.csv: kn,error"}},
        {"svd-study",
         {cmd_svd_study,
          "Weighted singular values of Lambda(sigma_a) - Lambda(0) over kn.list.\n"
          "  svd_spectra.csv: kn,k,value,refined,usable\n"
          "  svd_fits.csv: kn,usable,head_slope,head_curvature,head_concave,"
          "tail_slope,has_tail,crossover"}},
        {"figure1",
         {cmd_figure1,
          "Modulus lower-bound curves per figure1.kn_list and the crossover t*.\n"
          "  figure1_curve_<i>.csv: t,omega,holder,log,regime (regime in {holder, log})\n"
          "  figure1_transition.csv: kn,t_star,found\n"
          "  figure1_plot.dat: whitespace columns t omega, one block per Kn"}},
        {"selftest",
         {cmd_selftest,
          "Invariant suite across all modules.\n"
          "  selftest.csv: value,passed,check"}},
    };
    return r;
}
}  // namespace

//---------------------------------------------------------------------------//
std::vector<std::string> command_names()
{
    std::vector<std::string> n;
    for (auto const& [k, v] : registry())
        n.push_back(k);
    return n;
}

std::string command_help(std::string const& name)
{
    auto it = registry().find(name);
    if (it == registry().end())
        throw ArgumentError("unknown command '" + name + "'");
    return it->second.second;
}

int run_command(std::string const& name, ExperimentConfig const& config,
                std::ostream& log)
{
    auto it = registry().find(name);
    if (it == registry().end())
    {
        log << "error: unknown command '" << name << "'\n";
        return exit_usage;
    }
    std::string dir;
    try
    {
        dir = config.text("output.dir");
        int threads = config.integer("threads");
        if (threads < 1)
            throw ConfigError("threads must be >= 1");
        set_default_threads(threads);
        std::filesystem::create_directories(dir);
        Context ctx{config, log, dir};
        it->second.first(ctx);
        return exit_ok;
    }
    catch (ConfigError const& e)
    {
        log << "configuration error: " << e.what() << "\n";
        return exit_config;
    }
    catch (ArgumentError const& e)
    {
        log << "configuration error: " << e.what() << "\n";
        return exit_config;
    }
    catch (DomainError const& e)
    {
        log << "configuration error: " << e.what() << "\n";
        return exit_config;
    }
    catch (std::exception const& e)
    {
        log << "numerical failure: " << e.what() << "\n";
        try
        {
            json j;
            j["command"] = name;
            j["error"] = e.what();
            if (auto const* ne = dynamic_cast<NumericalError const*>(&e))
                j["achieved"] = ne->achieved();
            if (!dir.empty())
                write_file_atomic((std::filesystem::path(dir) / "diagnostics.json").string(),
                                  j.dump(2) + "\n");
        }
        catch (std::exception const&)
        {
            log << "could not write diagnostics.json\n";
        }
        return exit_numerical;
    }
}

//---------------------------------------------------------------------------//
std::vector<SelftestCheck> run_selftest(ExperimentConfig const& config,
                                        std::ostream& log)
{
    std::vector<SelftestCheck> out;
    auto add = [&](std::string name, double value, bool passed) {
        log << (passed ? "ok   " : "FAIL ") << name << " = " << value << "\n";
        out.push_back({std::move(name), value, passed});
    };
    auto seed = static_cast<std::uint64_t>(config.number("seed"));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0, 1);
    auto bump = AbsorptionField::bump(10, 0.6);
    auto l1 = BoundaryData::mode(3, harmonic_index(3, 1, 0));

    // Special functions and layer.
    auto km = kernel_moments();
    double dev = std::max({std::abs(km.m0_plus - 0.5), std::abs(km.m1_plus - 0.25),
                           std::abs(km.m2_plus - 1.0 / 3), std::abs(km.m_total - 1.0)});
    add("kernel_moments_max_deviation", dev, dev <= 1e-9);
    auto lc = compute_layer_constants(1000, 40.0);
    double wmin = std::min(*std::min_element(lc.w1.w.begin(), lc.w1.w.end()),
                           *std::min_element(lc.w2.w.begin(), lc.w2.w.end()));
    add("layer_profiles_min", wmin, wmin >= 0);
    add("layer_ratio_deviation", std::abs(lc.ratio - kLayerRatio),
        std::abs(lc.ratio - kLayerRatio) <= 1e-3);

    // Transport.
    auto one = solve_mean_intensity(BoundaryData::constant(3, 1.0), 0.1, AbsorptionField());
    double cerr = 0;
    for (int i = 0; i < 50; ++i)
    {
        Vec3 x(unif(rng) - 0.5, unif(rng) - 0.5, unif(rng) - 0.5);
        cerr = std::max(cerr, std::abs(one.mean(x * 1.1) - 1));
    }
    add("constant_solution_error", cerr, cerr <= 1e-6);
    double mass = 0;
    for (int i = 0; i < 10; ++i)
    {
        Vec3 x(unif(rng) - 0.5, unif(rng) - 0.5, unif(rng) - 0.5);
        mass = std::max(mass, kernel_mass(x, 0.1, bump));
    }
    add("kernel_mass_max", mass, mass <= 1 + 1e-12);
    auto absorbed = solve_mean_intensity(BoundaryData::constant(3, 1.0), 0.1, bump);
    double lo = 1, hi = 0;
    for (int i = 0; i < 50; ++i)
    {
        Vec3 x(unif(rng) - 0.5, unif(rng) - 0.5, unif(rng) - 0.5);
        double u = absorbed.mean(x * 1.1);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    add("max_principle_range_min", lo, lo >= 0);
    add("max_principle_range_max", hi, hi <= 1 + 1e-8);

    // Elliptic.
    double dtn = 0;
    for (int l = 0; l <= 8; ++l)
        dtn = std::max(dtn, std::abs(dtn_mode(l, AbsorptionField()) - l) / std::max(1, l));
    add("dtn_eigenvalue_relative_error", dtn, dtn <= 1e-6);

    // Albedo.
    auto P = assemble_albedo(bump, 0.2, 9);
    auto D = assemble_albedo_modal(bump, 0.2, 9);
    double route = (P.M - D.M).cwiseAbs().maxCoeff();
    add("albedo_route_agreement", route, route <= 1e-10);
    auto Pb = assemble_albedo(bump, 0.2, 9, {}, Orientation::backward);
    double adj = (Pb.M - P.M.transpose()).norm() / P.M.norm();
    add("albedo_adjoint_transpose", adj, adj <= 1e-8);
    AlbedoOptions wo;
    wo.transport.mu_per_panel = 3;
    wo.transport.n_azimuth = 8;
    auto wf = weak_form_check(bump, 0.2, l1, l1, 1, wo);
    add("weak_form_residual", wf.residual, wf.residual <= 5e-3);

    // Entropy machinery.
    int bad = 0;
    std::uniform_real_distribution<double> lu(-6, 1);
    for (int trial = 0; trial < 1000; ++trial)
    {
        std::vector<double> v(1 + trial % 20);
        for (double& x : v)
            x = std::exp(lu(rng));
        std::sort(v.begin(), v.end(), std::greater<>());
        auto e = entropy_bounds_from_spectrum(SingularSpectrum(v), std::exp(lu(rng)));
        if (!(e.lower <= e.upper))
            ++bad;
    }
    add("entropy_order_violations", bad, bad == 0);
    long mismatch = 0;
    for (auto const& s : {SingularSpectrum::exponential(1.0, 200),
                          SingularSpectrum::polynomial(8.0, 200)})
        for (double t : {1e-2, 1e-5, 1e-8})
        {
            auto b = comparison_upper_bound(s, t);
            std::size_t brute = 0;
            for (double a : s.values())
                for (double c : s.values())
                    if (std::pow(a, 0.25) * std::pow(c, 0.25) >= b.threshold)
                        ++brute;
            mismatch += std::abs(long(brute) - long(b.m));
        }
    add("comparison_pair_count_mismatch", double(mismatch), mismatch == 0);
    auto sp = singular_sum_property(200, 20, 20, 20, seed);
    add("singular_sum_violations", sp.violations, sp.violations == 0);
    int orth = 0;
    for (int m = 1; m <= 6; ++m)
        orth += nonneg_cover_lower(m, 0.35, 8000, seed).holds() ? 0 : 1;
    add("orthant_bound_failures", orth, orth == 0);
    int sand = 0;
    for (auto const& [axes, t] : std::vector<std::pair<std::vector<double>, double>>{
             {{1, 1, 1}, 1.1}, {{1, 0.5}, 0.2}, {{1, 1e-7}, 0.1}})
        sand += sandwich_validation(axes, t).passed() ? 0 : 1;
    add("sandwich_failures", sand, sand == 0);

    // Modulus.
    ModulusParams mp;
    double dual = 0;
    for (double t = 1e-20; t < 0.3; t *= 3)
    {
        double a = modulus_lower_bound(t, mp).omega;
        dual = std::max(dual, std::abs(a - modulus_lower_bound_via_g(t, mp)) / a);
    }
    add("modulus_dual_relative_gap", dual, dual <= 1e-12);
    auto curve = modulus_curve(mp, 1e-30, 0.3, 200);
    bool mono = std::is_sorted(curve.omega.begin(), curve.omega.end());
    add("modulus_nondecreasing", mono, mono);
    auto ts = transition_study({1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2}, mp);
    add("transition_increasing", ts.increasing, ts.increasing);
    add("transition_beta_spread", ts.beta_spread, ts.beta_spread <= 0.02);

    // Singular values of albedo differences.
    auto so = default_svd_options();
    so.max_degree = 2;
    auto same = albedo_svd_study(bump, bump, {0.2}, so);
    add("svd_equal_sigma_max", same.runs[0].values.front(),
        same.runs[0].values.front() == 0.0);
    so.max_degree = 8;
    auto head = albedo_svd_study(bump, AbsorptionField(), {0.1}, so);
    add("svd_head_curvature", head.runs[0].head_curvature, head.runs[0].head_concave);

    // Remainder and diffusion limit.
    RemainderOptions ro;
    ro.n_radii = 8;
    ro.n_directions = 4;
    ro.transport.mu_per_panel = 3;
    ro.transport.n_azimuth = 8;
    auto zr = remainder_fields(l1, AbsorptionField(), 0.1, ro);
    add("zero_absorption_flux_remainder", zr.vr_max, zr.vr_max == 0.0);
    auto dl = diffusion_limit_study(l1, AbsorptionField(), {0.2, 0.1, 0.05});
    add("diffusion_rate", dl.rate, dl.rate >= 0.8);
    return out;
}

}  // namespace knt
