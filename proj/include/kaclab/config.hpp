#pragma once

// Run configuration assembled from defaults, an optional JSON file and
// command-line flags (flags win over the file, the file over defaults).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kaclab/analysis.hpp"
#include "kaclab/io.hpp"
#include "kaclab/scheme.hpp"

namespace kaclab {

struct RunConfig {
    std::optional<int> preset;                  ///< 1..5
    std::optional<std::string> custom_initial;  ///< path to a `v,f` table
    double v_max = 8.0;
    long n_cells = 400;
    SchemeConfig<double> scheme;
    bool t_end_set = false;  ///< false: the preset's default horizon applies
    std::optional<FitWindow<double>> fit_window;
    std::string output_dir = "kaclab_out";
    MonitorTolerances<double> tolerances;
    double smallness_threshold = 1.0;  ///< m^3/e threshold of the informational report
    long profile_every = 100;          ///< write a profile snapshot every this many records (and at the end)
    bool all_presets = false;

    /// Throws ValidationError naming the offending field.
    void validate() const;

    /// Horizon actually used: scheme.t_end if set explicitly, else the preset default.
    double effective_t_end() const;
};

/// Thrown when flags or the config file cannot be parsed; carries the
/// key path or flag at fault in its message.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Outcome of parsing: either a configuration, or a help/version text to print.
struct ParsedArgs {
    RunConfig config;
    std::optional<std::string> message;  ///< set for --help
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// args excludes the program name.
ParsedArgs parse_config(const std::vector<std::string>& args, const EnvLookup& env = process_env);

/// Applies the keys of a JSON config object to cfg; unknown keys are errors.
void apply_config_json(RunConfig& cfg, const Json& j);

Json config_to_json(const RunConfig& cfg);

}  // namespace kaclab
