//---------------------------------------------------------------------------//
/*!
 * \file config.cpp
 */
//---------------------------------------------------------------------------//
#include "knt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "knt/error.hpp"
#include "knt/io.hpp"

extern char** environ;

namespace knt
{
namespace
{
double parse_number(std::string const& key, std::string const& v)
{
    std::size_t pos = 0;
    double x = 0;
    try
    {
        x = std::stod(v, &pos);
    }
    catch (std::exception const&)
    {
        throw ConfigError("key '" + key + "': '" + v + "' is not a number");
    }
    if (pos != v.size() || !std::isfinite(x))
        throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
    return x;
}
}  // namespace

ExperimentConfig ExperimentConfig::defaults()
{
    ExperimentConfig c;
    c.values_ = {
        {"seed", "20240611"},
        {"threads", "1"},
        {"output.dir", "knt_out"},
        {"domain.d", "3"},
        {"domain.radius", "1"},
        {"sigma_a.kind", "bump"},
        {"sigma_a.r_support", "0.6"},
        {"sigma_a.amplitude", "10"},
        {"datum.kind", "mode"},
        {"datum.l", "1"},
        {"datum.m", "0"},
        {"datum.value", "1"},
        {"kn.value", "0.1"},
        {"kn.list", "0.2, 0.1, 0.05"},
        {"basis.n_modes", "16"},
        {"albedo.route", "projection"},
        {"transport.tol", "1e-10"},
        {"transport.n_bulk", "48"},
        {"transport.mu_per_panel", "6"},
        {"transport.t_per_panel", "4"},
        {"transport.n_azimuth", "16"},
        {"transport.n_out", "41"},
        {"layer.ymax", "40"},
        {"layer.n", "2000"},
        {"remainder.n_radii", "20"},
        {"remainder.n_directions", "32"},
        {"remainder.r_k", "0.5"},
        {"sobolev.s", "18"},
        {"sobolev.s1", "5.5"},
        {"instability.gamma", "5"},
        {"instability.c1", "1"},
        {"instability.c2", "1"},
        {"instability.c3", "1"},
        {"instability.kn_exponent", "stated"},
        {"svd.s", "0.5"},
        {"svd.max_degree", "12"},
        {"figure1.kn_list", "1e-8, 1e-6, 1e-4, 1e-2"},
        {"figure1.t_min", "1e-30"},
        {"figure1.t_max", "0.3"},
        {"figure1.n", "200"},
    };
    return c;
}

void ExperimentConfig::load_text(std::string const& text, std::string const& origin)
{
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError(where + ": empty key");
        if (!section.empty())
            key = section + "." + key;
        try
        {
            set(key, trim(line.substr(eq + 1)));
        }
        catch (ConfigError const& e)
        {
            throw ConfigError(where + ": " + e.what());
        }
    }
}

void ExperimentConfig::load_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    load_text(ss.str(), path);
}

void ExperimentConfig::apply_environment(std::vector<std::string> const& env)
{
    for (auto const& entry : env)
    {
        if (entry.rfind("KNT_", 0) != 0)
            continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            continue;
        std::string name = entry.substr(4, eq - 4), key;
        for (std::size_t i = 0; i < name.size(); ++i)
        {
            if (name[i] == '_' && i + 1 < name.size() && name[i + 1] == '_')
            {
                key += '.';
                ++i;
            }
            else
                key += static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
        }
        try
        {
            set(key, trim(entry.substr(eq + 1)));
        }
        catch (ConfigError const& e)
        {
            throw ConfigError("environment KNT_" + name + ": " + e.what());
        }
    }
}

void ExperimentConfig::set(std::string const& key, std::string const& value)
{
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("unknown key '" + key + "'");
    it->second = value;
}

std::string const& ExperimentConfig::text(std::string const& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("unknown key '" + key + "'");
    return it->second;
}

double ExperimentConfig::number(std::string const& key) const
{
    return parse_number(key, text(key));
}

int ExperimentConfig::integer(std::string const& key) const
{
    double x = number(key);
    if (x != std::floor(x) || std::abs(x) > 2e9)
        throw ConfigError("key '" + key + "': expected an integer");
    return static_cast<int>(x);
}

std::vector<double> ExperimentConfig::list(std::string const& key) const
{
    std::vector<double> out;
    for (auto const& piece : split(text(key), ','))
        if (!piece.empty())
            out.push_back(parse_number(key, piece));
    if (out.empty())
        throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::string ExperimentConfig::dump() const
{
    std::string s;
    for (auto const& [k, v] : values_)
        s += k + " = " + v + "\n";
    return s;
}

std::vector<std::string> process_environment()
{
    std::vector<std::string> env;
    for (char** e = environ; e && *e; ++e)
        env.emplace_back(*e);
    return env;
}

//---------------------------------------------------------------------------//
AbsorptionField config_absorption(ExperimentConfig const& c)
{
    if (c.number("domain.radius") != 1.0)
        throw ConfigError("domain.radius: only the unit ball is supported");
    std::string kind = c.text("sigma_a.kind");
    if (kind == "zero")
        return AbsorptionField();
    if (kind == "bump")
    {
        double a = c.number("sigma_a.amplitude"), r = c.number("sigma_a.r_support");
        if (!(a >= 0))
            throw ConfigError("sigma_a.amplitude must be nonnegative");
        if (!(r > 0 && r < 1))
            throw ConfigError("sigma_a.r_support must lie in (0, 1)");
        return AbsorptionField::bump(a, r);
    }
    throw ConfigError("sigma_a.kind must be 'bump' or 'zero'");
}

BoundaryData config_datum(ExperimentConfig const& c)
{
    int d = c.integer("domain.d");
    if (d != 3)
        throw ConfigError("domain.d: transport commands support d = 3 only");
    std::string kind = c.text("datum.kind");
    double v = c.number("datum.value");
    if (kind == "constant")
        return BoundaryData::constant(3, v);
    if (kind == "mode")
    {
        int l = c.integer("datum.l"), m = c.integer("datum.m");
        if (l < 0 || std::abs(m) > l)
            throw ConfigError("datum: need l >= 0 and |m| <= l");
        return BoundaryData::mode(3, harmonic_index(3, l, m), v);
    }
    throw ConfigError("datum.kind must be 'mode' or 'constant'");
}

TransportOptions config_transport(ExperimentConfig const& c)
{
    TransportOptions o;
    o.tol = c.number("transport.tol");
    o.n_bulk = c.integer("transport.n_bulk");
    o.mu_per_panel = c.integer("transport.mu_per_panel");
    o.t_per_panel = c.integer("transport.t_per_panel");
    o.n_azimuth = c.integer("transport.n_azimuth");
    if (!(o.tol > 0 && o.tol < 1) || o.n_bulk < 4 || o.mu_per_panel < 1
        || o.t_per_panel < 1 || o.n_azimuth < 4)
        throw ConfigError("transport options out of range");
    return o;
}

ModulusParams config_modulus(ExperimentConfig const& c)
{
    ModulusParams p;
    p.d = c.integer("domain.d");
    p.gamma = c.number("instability.gamma");
    p.s = c.number("sobolev.s");
    p.s1 = c.number("sobolev.s1");
    p.C1 = c.number("instability.c1");
    p.C2 = c.number("instability.c2");
    p.C3 = c.number("instability.c3");
    std::string e = c.text("instability.kn_exponent");
    if (e == "stated")
        p.kn_exponent = KnExponent::stated;
    else if (e == "composed")
        p.kn_exponent = KnExponent::composed;
    else
        throw ConfigError("instability.kn_exponent must be 'stated' or 'composed'");
    validate_modulus_params(p);
    return p;
}

std::vector<double> config_kn_list(ExperimentConfig const& c, std::string const& key)
{
    auto v = c.list(key);
    for (double kn : v)
        if (!(kn > 0 && kn <= 1))
            throw ConfigError(key + ": every Kn must lie in (0, 1]");
    return v;
}

double config_kn(ExperimentConfig const& c)
{
    double kn = c.number("kn.value");
    if (!(kn > 0 && kn <= 1))
        throw ConfigError("kn.value must lie in (0, 1]");
    return kn;
}

}  // namespace knt
