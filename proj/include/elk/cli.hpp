#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elk/report.hpp"
#include "elk/verify.hpp"

namespace elk::cli {

/// Everything a run depends on. Config-file keys and long flag names are the
/// same strings (`n`, `box`, `tol.identity`, ...); see RunConfig::keys().
struct RunConfig {
    std::string subcommand;   ///< "norm", "check energy", "gen bump", ...
    int n = 32;
    std::optional<double> box;
    std::optional<std::string> gamma, p;  ///< numbers, or a:b:step ranges for eta-map
    std::string radii, ladder;
    double dt = 1e-3, T = 0.5;
    std::string out;
    verify::Tolerances tol;
    std::map<std::string, double> tol_overrides;
    bool dump_spectra = false;

    std::string input, director;  ///< ELF3 inputs
    std::string space = "local";  ///< norm: local | weighted | homogeneous
    double r = 4.5;               ///< homogeneous Morrey exponent
    std::string state = "trivial";
    double R = 2.0;
    std::string preset;
    double amplitude = -1.0;  ///< < 0: the preset's default
    int snapshot_every = 0;
    std::string probe_radii;
    bool freeze_velocity = false;
    std::string report = "residual";  ///< counterexample: residual | liouville
    int seeds = 10;
    std::string run;              ///< trajectory directory read by check energy / local-energy
    double span = 0.0, stride = 0.0;  ///< local-energy windows; 0 picks defaults
    std::string scheme = "spectral";
    double window = 0.0;

    /// Parses and stores one key; throws ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    static std::vector<std::string> keys();
    static bool is_flag(const std::string& key);  ///< takes no value on the command line
    report::Json to_json() const;
};

/// key=value lines; '#' starts a comment. Throws ConfigError.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Runs one command line (args[0] is the program name). The JSON document goes
/// to `out`, diagnostics to `err`. Returns the exit code: 0 all checks hold,
/// 1 a violation was found, 2 usage or configuration error, 3 a precondition
/// refused the input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elk::cli
