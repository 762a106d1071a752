#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "knt/config.hpp"
#include "knt/error.hpp"
#include "knt/io.hpp"
#include "knt/runner.hpp"

using namespace knt;
namespace fs = std::filesystem;

namespace
{
std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig config_in(std::string const& dir)
{
    auto c = ExperimentConfig::defaults();
    c.set("output.dir", (fs::temp_directory_path() / dir).string());
    fs::remove_all(c.text("output.dir"));
    return c;
}

std::vector<std::vector<std::string>> read_csv(fs::path const& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(slurp(p));
    std::string line;
    while (std::getline(is, line))
        rows.push_back(split(line, ','));
    return rows;
}
}  // namespace

TEST(Config, SectionsCommentsAndTypes)
{
    auto c = ExperimentConfig::defaults();
    c.load_text("seed = 5  # comment\n[kn]\nlist = 0.4, 0.2\n\n[sigma_a]\namplitude=3\n");
    EXPECT_EQ(c.integer("seed"), 5);
    EXPECT_EQ(c.list("kn.list"), (std::vector<double>{0.4, 0.2}));
    EXPECT_EQ(c.number("sigma_a.amplitude"), 3.0);
    EXPECT_EQ(config_absorption(c).descriptor(), AbsorptionField::bump(3, 0.6).descriptor());
}

TEST(Config, UnknownAndMalformedRejected)
{
    auto c = ExperimentConfig::defaults();
    EXPECT_THROW(c.load_text("bogus = 1\n"), ConfigError);
    EXPECT_THROW(c.load_text("[kn]\nlists = 1\n"), ConfigError);
    EXPECT_THROW(c.load_text("seed 5\n"), ConfigError);
    EXPECT_THROW(c.load_text("[kn\n"), ConfigError);
    c.set("seed", "abc");
    EXPECT_THROW(c.integer("seed"), ConfigError);
    c.set("seed", "1.5");
    EXPECT_THROW(c.integer("seed"), ConfigError);
    try
    {
        c.load_text("\n\nnope = 2\n", "file.cfg");
        FAIL();
    }
    catch (ConfigError const& e)
    {
        EXPECT_NE(std::string(e.what()).find("file.cfg:3"), std::string::npos);
    }
}

TEST(Config, EnvironmentOverrides)
{
    auto c = ExperimentConfig::defaults();
    c.apply_environment({"PATH=/bin", "KNT_SEED=9", "KNT_SIGMA_A__R_SUPPORT=0.4",
                         "KNT_KN__LIST=0.3,0.15"});
    EXPECT_EQ(c.integer("seed"), 9);
    EXPECT_EQ(c.number("sigma_a.r_support"), 0.4);
    EXPECT_EQ(c.list("kn.list").size(), 2u);
    EXPECT_THROW(c.apply_environment({"KNT_NOT__A_KEY=1"}), ConfigError);
}

TEST(Config, PhysicalValidation)
{
    auto c = ExperimentConfig::defaults();
    c.set("kn.list", "0.1, 1.5");
    EXPECT_THROW(config_kn_list(c), ConfigError);
    c.set("kn.value", "0");
    EXPECT_THROW(config_kn(c), ConfigError);
    c.set("sobolev.s", "10");
    EXPECT_THROW(config_modulus(c), ConfigError);
    c = ExperimentConfig::defaults();
    c.set("instability.gamma", "4");
    EXPECT_THROW(config_modulus(c), ConfigError);
    c = ExperimentConfig::defaults();
    c.set("domain.radius", "2");
    EXPECT_THROW(config_absorption(c), ConfigError);
}

TEST(Runner, ExitCodes)
{
    std::ostringstream log;
    auto c = config_in("knt_cli_exit");
    EXPECT_EQ(run_command("no-such-command", c, log), exit_usage);
    c.set("figure1.t_max", "0.1");
    c.set("figure1.t_min", "0.2");
    EXPECT_EQ(run_command("figure1", c, log), exit_config);
    c = config_in("knt_cli_exit");
    c.set("transport.tol", "1e-30");
    EXPECT_EQ(run_command("transport-solve", c, log), exit_numerical);
    EXPECT_TRUE(fs::exists(fs::path(c.text("output.dir")) / "diagnostics.json"));
}

TEST(Runner, Figure1Schema)
{
    std::ostringstream log;
    auto c = config_in("knt_cli_fig1");
    c.set("figure1.kn_list", "1e-6, 1e-4, 1e-2");
    c.set("figure1.n", "50");
    ASSERT_EQ(run_command("figure1", c, log), exit_ok) << log.str();
    fs::path dir = c.text("output.dir");
    for (int i = 0; i < 3; ++i)
    {
        auto rows = read_csv(dir / ("figure1_curve_" + std::to_string(i) + ".csv"));
        ASSERT_EQ(rows.size(), 51u);
        EXPECT_EQ(rows[0].back(), "regime");
        for (std::size_t r = 1; r < rows.size(); ++r)
            EXPECT_TRUE(rows[r].back() == "holder" || rows[r].back() == "log");
        EXPECT_EQ(rows[1].back(), "holder");
    }
    EXPECT_FALSE(fs::exists(dir / "figure1_curve_3.csv"));
    EXPECT_TRUE(fs::exists(dir / "figure1_plot.dat"));
    EXPECT_NE(slurp(dir / "figure1.json").find("\"beta\""), std::string::npos);
}

TEST(Runner, LayerConstantsDeterministic)
{
    std::ostringstream log;
    auto a = config_in("knt_cli_det_a");
    auto b = config_in("knt_cli_det_b");
    for (auto* c : {&a, &b})
        c->set("layer.n", "300");
    ASSERT_EQ(run_command("layer-constants", a, log), exit_ok);
    ASSERT_EQ(run_command("layer-constants", b, log), exit_ok);
    for (auto const* name : {"layer_constants.csv", "layer_profiles.csv"})
    {
        auto x = slurp(fs::path(a.text("output.dir")) / name);
        EXPECT_FALSE(x.empty());
        EXPECT_EQ(x, slurp(fs::path(b.text("output.dir")) / name));
    }
}

TEST(Runner, ThreadCountDoesNotChangeResults)
{
    std::ostringstream log;
    auto a = config_in("knt_cli_thr_a");
    auto b = config_in("knt_cli_thr_b");
    b.set("threads", "3");
    for (auto* c : {&a, &b})
    {
        c->set("datum.l", "2");
        c->set("transport.n_out", "11");
    }
    ASSERT_EQ(run_command("transport-solve", a, log), exit_ok) << log.str();
    ASSERT_EQ(run_command("transport-solve", b, log), exit_ok) << log.str();
    auto ra = read_csv(fs::path(a.text("output.dir")) / "mean_intensity.csv");
    auto rb = read_csv(fs::path(b.text("output.dir")) / "mean_intensity.csv");
    ASSERT_EQ(ra.size(), rb.size());
    for (std::size_t i = 1; i < ra.size(); ++i)
        EXPECT_NEAR(std::stod(ra[i].back()), std::stod(rb[i].back()), 1e-10);
}

TEST(Runner, AlbedoAssembleWritesMatrix)
{
    std::ostringstream log;
    auto c = config_in("knt_cli_alb");
    c.set("basis.n_modes", "4");
    c.set("albedo.route", "per-degree");
    c.set("kn.value", "0.2");
    ASSERT_EQ(run_command("albedo-assemble", c, log), exit_ok) << log.str();
    auto rows = read_csv(fs::path(c.text("output.dir")) / "albedo_matrix.csv");
    EXPECT_EQ(rows.size(), 17u);
    c.set("albedo.route", "other");
    EXPECT_EQ(run_command("albedo-assemble", c, log), exit_config);
}

TEST(Runner, HelpListsSchemas)
{
    for (auto const& n : command_names())
        EXPECT_NE(command_help(n).find(".csv"), std::string::npos) << n;
    EXPECT_EQ(command_names().size(), 7u);
}
