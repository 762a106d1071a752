//---------------------------------------------------------------------------//
/*!
 * \file knt.cpp
 * \brief Command-line front end: knt <command> [options].
 */
//---------------------------------------------------------------------------//
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "knt/config.hpp"
#include "knt/error.hpp"
#include "knt/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Kinetic-to-diffusive transport experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_file;
    std::vector<std::string> sets;
    std::string out_dir;
    int threads = 0;
    bool dump = false;
    app.add_option("-c,--config", config_file, "key = value configuration file");
    app.add_option("-s,--set", sets, "override one key: section.key=value")
        ->allow_extra_args(false);
    app.add_option("-o,--out", out_dir, "output directory (output.dir)");
    app.add_option("-j,--threads", threads, "worker threads (threads)");
    app.add_flag("--dump-config", dump, "print the effective configuration");

    std::string chosen;
    for (auto const& name : knt::command_names())
    {
        auto* sub = app.add_subcommand(name, knt::command_help(name));
        sub->callback([&chosen, name] { chosen = name; });
    }
    app.footer("Configuration precedence: defaults, --config file, KNT_* "
               "environment (KNT_SECTION__KEY), --set.\nExit codes: 0 ok, "
               "1 usage, 2 configuration, 3 numerical failure.");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForAllHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return knt::exit_usage;
    }

    knt::ExperimentConfig cfg = knt::ExperimentConfig::defaults();
    try
    {
        if (!config_file.empty())
            cfg.load_file(config_file);
        cfg.apply_environment(knt::process_environment());
        for (auto const& s : sets)
        {
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw knt::ConfigError("--set expects key=value, got '" + s + "'");
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (!out_dir.empty())
            cfg.set("output.dir", out_dir);
        if (threads > 0)
            cfg.set("threads", std::to_string(threads));
    }
    catch (knt::ConfigError const& e)
    {
        std::cerr << "configuration error: " << e.what() << "\n";
        return knt::exit_config;
    }
    if (dump)
        std::cout << cfg.dump();
    return knt::run_command(chosen, cfg, std::cerr);
}
