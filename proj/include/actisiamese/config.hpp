#ifndef ACTISIAMESE_CONFIG_HPP
#define ACTISIAMESE_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "actisiamese/runner.hpp"
#include "actisiamese/streams.hpp"

namespace actisiamese {

/// Documentation entry for one configuration key.
struct ConfigKey {
    const char* name;
    const char* default_value;
    const char* description;
};

/// Every accepted key in canonical order.
const std::vector<ConfigKey>& config_keys();

/// Typed, validated view of a RunConfig.
struct Experiment {
    std::string dataset;  // sea | circles | blobs | csv
    StreamSpec stream;    // synthetic datasets; seed is set per run
    std::string csv_path;
    CsvOptions csv;
    int seeds = 20;
    std::uint64_t seed_base = 1;
    std::vector<Method> methods;
    MethodConfig method_defaults;  // `method` is overwritten per arm
    std::string output_dir;        // empty = caller's default

    std::vector<std::uint64_t> seed_list() const;
    std::vector<GridArm> arms() const;

    /// Stream for one run seed. CSV streams ignore the seed.
    StreamData make_stream(std::uint64_t seed) const;
};

/**
 * Flat key/value run configuration.
 *
 * File syntax: one `key = value` per line; `#` starts a comment; blank lines
 * are ignored. Every key has a default, so an empty file is a valid config.
 */
class RunConfig {
public:
    RunConfig();

    /// Throws ParseError (with the line number) on malformed lines or unknown keys.
    static RunConfig parse(std::istream& in);
    /// Throws InputError when the file cannot be read.
    static RunConfig load(const std::string& path);

    /// Throws ConfigError for unknown keys.
    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    const std::map<std::string, std::string>& settings() const { return values_; }

    /// Canonical text form; parse(to_text()) reproduces the same settings.
    std::string to_text() const;

    /// Throws ConfigError on invalid values or combinations.
    Experiment resolve() const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace actisiamese

#endif // ACTISIAMESE_CONFIG_HPP
