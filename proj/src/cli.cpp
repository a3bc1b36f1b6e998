#include "actisiamese/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "actisiamese/recipes.hpp"

#ifndef ACTISIAMESE_VERSION
#define ACTISIAMESE_VERSION "unknown"
#endif

namespace actisiamese {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Shortest round-trip decimal form; identical bits give identical text.
std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

bool keep_row(long t, long last, long thin) { return thin <= 1 || t % thin == 0 || t == last; }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
}

std::string default_output_dir(const std::string& leaf) {
    const char* env = std::getenv(kOutputDirEnv);
    const fs::path base = (env != nullptr && *env != '\0') ? fs::path(env) : fs::path("results");
    return (base / leaf).string();
}

} // namespace

std::string write_outputs(const GridResult& result, const Experiment& experiment,
                          const RunConfig& config, const OutputOptions& options,
                          const std::string& origin, double wall_seconds) {
    const fs::path dir(options.directory);
    fs::create_directories(dir);

    json outputs = json::object();
    json failures = json::array();
    std::ostringstream summary;
    summary << "method,runs,failures,final_gmean_mean,final_gmean_stderr\n";
    std::ostringstream aggregate;
    aggregate << "t,method,gmean_mean,gmean_stderr\n";

    for (const GridArm& arm : experiment.arms()) {
        std::ostringstream csv;
        csv << "t,method,seed,gmean,accuracy,labels_spent,b_hat,theta\n";
        int ok = 0;
        int failed = 0;
        for (const RunResult& run : result.runs) {
            if (run.arm != arm.name) {
                continue;
            }
            if (run.error) {
                ++failed;
                failures.push_back({{"method", run.arm}, {"seed", run.seed}, {"error", *run.error}});
                continue;
            }
            ++ok;
            const long last = run.rows.empty() ? 0 : run.rows.back().t;
            for (const MetricsRow& row : run.rows) {
                if (!keep_row(row.t, last, options.thin)) {
                    continue;
                }
                csv << row.t << ',' << arm.name << ',' << run.seed << ','
                    << format_double(row.gmean) << ',' << format_double(row.accuracy) << ','
                    << row.labels_spent << ',' << format_double(row.b_hat) << ','
                    << format_double(row.theta) << '\n';
            }
        }
        const std::string file = arm.name + ".csv";
        write_text(dir / file, csv.str());
        outputs[arm.name] = file;

        const auto it = result.gmean.find(arm.name);
        const std::vector<AggregatePoint> empty;
        const auto& curve = it != result.gmean.end() ? it->second : empty;
        summary << arm.name << ',' << ok << ',' << failed << ',';
        if (curve.empty()) {
            summary << ",\n";
        } else {
            summary << format_double(curve.back().mean) << ','
                    << format_double(curve.back().std_error) << '\n';
        }
        const long last = static_cast<long>(curve.size());
        for (long t = 1; t <= last; ++t) {
            if (keep_row(t, last, options.thin)) {
                const auto& p = curve[static_cast<std::size_t>(t - 1)];
                aggregate << t << ',' << arm.name << ',' << format_double(p.mean) << ','
                          << format_double(p.std_error) << '\n';
            }
        }
    }
    write_text(dir / "summary.csv", summary.str());
    write_text(dir / "aggregate.csv", aggregate.str());

    json settings = json::object();
    for (const auto& key : config_keys()) {
        settings[key.name] = config.get(key.name);
    }
    json manifest = {
        {"tool", "actisiamese"},
        {"version", ACTISIAMESE_VERSION},
        {"origin", origin},
        {"config", settings},
        {"seeds", experiment.seed_list()},
        {"thin", options.thin},
        {"jobs", options.jobs},
        {"started_utc", utc_timestamp()},
        {"wall_clock_seconds", wall_seconds},
        {"outputs", outputs},
        {"summary", "summary.csv"},
        {"aggregate", "aggregate.csv"},
        {"failures", failures},
    };
    const fs::path manifest_path = dir / "manifest.json";
    write_text(manifest_path, manifest.dump(2) + "\n");
    return manifest_path.string();
}

namespace {

struct Invocation {
    RunConfig config;
    std::string origin;
    OutputOptions options;
};

// Executes a fully configured invocation: validate, run, write, summarize.
int execute(Invocation inv, std::ostream& out, std::ostream& err) {
    Experiment experiment;
    try {
        experiment = inv.config.resolve();
    } catch (const std::exception& e) {
        err << "error: invalid configuration: " << e.what() << '\n';
        return 2;
    }
    if (experiment.output_dir.empty()) {
        experiment.output_dir = inv.options.directory;
        inv.config.set("output_dir", experiment.output_dir);
    }
    inv.options.directory = experiment.output_dir;

    if (experiment.dataset == "csv") {
        try {
            (void)experiment.make_stream(0);  // surface data errors before any output exists
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        }
    }

    const auto arms = experiment.arms();
    const auto seeds = experiment.seed_list();
    out << "running " << arms.size() * seeds.size() << " runs (" << arms.size() << " methods x "
        << seeds.size() << " seeds) on " << inv.options.jobs << " job(s)\n";

    const auto start = std::chrono::steady_clock::now();
    const GridResult result =
        run_grid(arms, seeds, [&](std::uint64_t s) { return experiment.make_stream(s); },
                 inv.options.jobs);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::string manifest;
    try {
        manifest = write_outputs(result, experiment, inv.config, inv.options, inv.origin, wall);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    int failures = 0;
    for (const auto& run : result.runs) {
        if (run.error) {
            ++failures;
            err << "run failed: " << run.arm << " seed " << run.seed << ": " << *run.error << '\n';
        }
    }
    out << "final G-mean (mean +/- stderr):\n";
    for (const auto& arm : arms) {
        const auto& curve = result.gmean.at(arm.name);
        out << "  " << std::left << std::setw(16) << arm.name;
        if (curve.empty()) {
            out << "no successful runs\n";
        } else {
            out << std::fixed << std::setprecision(4) << curve.back().mean << " +/- "
                << curve.back().std_error << '\n';
            out.unsetf(std::ios::floatfield);
        }
    }
    out << "outputs written to " << inv.options.directory << " (manifest " << manifest << ")\n";
    return failures == 0 ? 0 : 3;
}

// Moves `--key value` / `--key=value` pairs naming config keys out of args.
std::vector<std::pair<std::string, std::string>> extract_overrides(std::vector<std::string>& args) {
    std::vector<std::pair<std::string, std::string>> overrides;
    std::vector<std::string> rest;
    const auto& keys = config_keys();
    const auto is_key = [&](const std::string& k) {
        return std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& c) { return k == c.name; });
    };
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) == 0 && a.size() > 2) {
            const auto eq = a.find('=');
            const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
            if (is_key(key)) {
                if (eq != std::string::npos) {
                    overrides.emplace_back(key, a.substr(eq + 1));
                    continue;
                }
                if (i + 1 >= args.size()) {
                    throw ConfigError("override --" + key + " needs a value");
                }
                overrides.emplace_back(key, args[++i]);
                continue;
            }
        }
        rest.push_back(a);
    }
    args = std::move(rest);
    return overrides;
}

RunConfig config_from_manifest(const std::string& path, long& thin) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot read manifest '" + path + "'");
    }
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("manifest '" + path + "': " + e.what());
    }
    if (!manifest.contains("config") || !manifest["config"].is_object()) {
        throw ParseError("manifest '" + path + "' has no config object");
    }
    RunConfig config;
    for (const auto& [key, value] : manifest["config"].items()) {
        config.set(key, value.get<std::string>());
    }
    if (manifest.contains("thin")) {
        thin = manifest["thin"].get<long>();
    }
    return config;
}

} // namespace

int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    std::vector<std::pair<std::string, std::string>> overrides;
    try {
        overrides = extract_overrides(args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"Online active learning experiments on synthetic and CSV streams", "actisiamese"};
    app.set_version_flag("--version", ACTISIAMESE_VERSION);
    app.require_subcommand(1);
    app.footer("Config keys may be overridden as --key value, e.g. --seeds 5 --al.budget 0.05.");

    std::string config_path;
    std::string manifest_path;
    std::string recipe;
    int jobs = 1;
    long thin = 0;

    auto* run = app.add_subcommand("run", "run the experiment described by a config file or manifest");
    run->add_option("config", config_path, "config file");
    run->add_option("--manifest", manifest_path, "rerun the experiment recorded in a manifest");
    run->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
    run->add_option("--thin", thin, "write every N-th step")->check(CLI::PositiveNumber);

    auto* rec = app.add_subcommand("recipe", "run a named experiment preset");
    rec->add_option("name", recipe, "recipe name")->required();
    rec->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
    rec->add_option("--thin", thin, "write every N-th step")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list-recipes", "print the available recipe names");
    auto* validate = app.add_subcommand("validate-config", "check a config file and print it in canonical form");
    validate->add_option("config", config_path, "config file")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    if (list->parsed()) {
        for (const auto& name : recipe_names()) {
            out << name << '\n';
        }
        return 0;
    }

    Invocation inv;
    try {
        if (rec->parsed()) {
            auto config = recipe_config(recipe);
            if (!config) {
                err << "error: unknown recipe '" << recipe << "'; available recipes:\n";
                for (const auto& name : recipe_names()) {
                    err << "  " << name << '\n';
                }
                return 2;
            }
            inv.config = *config;
            inv.origin = "recipe " + recipe;
            inv.options.directory = default_output_dir(recipe);
        } else if (run->parsed() && !manifest_path.empty()) {
            if (!config_path.empty()) {
                err << "error: give either a config file or --manifest, not both\n";
                return 2;
            }
            long recorded_thin = 1;
            inv.config = config_from_manifest(manifest_path, recorded_thin);
            inv.origin = "manifest " + manifest_path;
            inv.options.directory = default_output_dir("rerun");
            if (thin == 0) {
                thin = recorded_thin;
            }
        } else {
            if (config_path.empty()) {
                err << "error: run needs a config file or --manifest\n";
                return 2;
            }
            inv.config = RunConfig::load(config_path);
            inv.origin = "config " + config_path;
            inv.options.directory = default_output_dir(fs::path(config_path).stem().string());
        }
        for (const auto& [key, value] : overrides) {
            inv.config.set(key, value);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    if (validate->parsed()) {
        try {
            (void)inv.config.resolve();
        } catch (const std::exception& e) {
            err << "error: invalid configuration: " << e.what() << '\n';
            return 2;
        }
        out << inv.config.to_text();
        return 0;
    }

    inv.options.jobs = jobs;
    inv.options.thin = thin > 0 ? thin : 1;
    return execute(std::move(inv), out, err);
}

} // namespace actisiamese
