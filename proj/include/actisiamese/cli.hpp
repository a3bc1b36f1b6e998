#ifndef ACTISIAMESE_CLI_HPP
#define ACTISIAMESE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "actisiamese/config.hpp"
#include "actisiamese/runner.hpp"

namespace actisiamese {

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "ACTISIAMESE_OUTPUT_DIR";

struct OutputOptions {
    std::string directory;
    long thin = 1;  // keep rows with t % thin == 0, plus the last row
    int jobs = 1;
};

/**
 * Writes one CSV per method (all seeds), summary.csv, aggregate.csv and
 * manifest.json into options.directory. Returns the manifest path.
 */
std::string write_outputs(const GridResult& result, const Experiment& experiment,
                          const RunConfig& config, const OutputOptions& options,
                          const std::string& origin, double wall_seconds);

/// Entry point of the `actisiamese` executable; returns the exit code.
int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace actisiamese

#endif // ACTISIAMESE_CLI_HPP
