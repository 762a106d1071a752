//---------------------------------------------------------------------------//
/*!
 * \file knt/config.hpp
 * \brief Key = value experiment configuration with sections.
 *
 * Text lines are "key = value", "[section]" headers prefix later keys with
 * "section.", and '#' starts a comment. Only keys present in the defaults
 * are accepted. Precedence: defaults, file, environment, explicit sets.
 * Environment variable KNT_<SECTION>__<KEY> maps to "section.key"
 * (lower-cased, double underscore for the dot).
 */
//---------------------------------------------------------------------------//
#pragma once

#include <map>
#include <string>
#include <vector>

#include "knt/absorption.hpp"
#include "knt/harmonics.hpp"
#include "knt/instability.hpp"
#include "knt/transport.hpp"

namespace knt
{
class ExperimentConfig
{
  public:
    //! Every accepted key with its default value.
    static ExperimentConfig defaults();

    //! Parse config text; \c origin names the source in error messages.
    void load_text(std::string const& text, std::string const& origin = "config");
    void load_file(std::string const& path);
    //! Apply KNT_* variables from a "NAME=value" list (e.g. environ).
    void apply_environment(std::vector<std::string> const& env);
    //! Set one known key; raises ConfigError for unknown keys.
    void set(std::string const& key, std::string const& value);

    bool has(std::string const& key) const { return values_.count(key) > 0; }
    std::string const& text(std::string const& key) const;
    double number(std::string const& key) const;
    int integer(std::string const& key) const;
    std::vector<double> list(std::string const& key) const;

    //! Sorted "key = value" lines.
    std::string dump() const;
    std::map<std::string, std::string> const& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

//! Collect the process environment as "NAME=value" strings.
std::vector<std::string> process_environment();

// Typed views, each validating its inputs (ConfigError on failure).
AbsorptionField config_absorption(ExperimentConfig const& c);
BoundaryData config_datum(ExperimentConfig const& c);
TransportOptions config_transport(ExperimentConfig const& c);
ModulusParams config_modulus(ExperimentConfig const& c);
//! Validated Kn list from \c key; every entry in (0, 1].
std::vector<double> config_kn_list(ExperimentConfig const& c,
                                   std::string const& key = "kn.list");
double config_kn(ExperimentConfig const& c);

}  // namespace knt
