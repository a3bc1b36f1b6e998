#ifndef ACTISIAMESE_RUNNER_HPP
#define ACTISIAMESE_RUNNER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actisiamese/active.hpp"
#include "actisiamese/ensemble.hpp"
#include "actisiamese/eval.hpp"
#include "actisiamese/learners.hpp"
#include "actisiamese/streams.hpp"

namespace actisiamese {

enum class MethodKind { rvus, actiq, rvss, actisiamese };

struct Method {
    MethodKind kind = MethodKind::actisiamese;
    bool ensemble = false;

    /// e.g. "actisiamese", "actiq-wm".
    std::string name() const;
    bool memory_based() const { return kind != MethodKind::rvus; }

    /// Throws ConfigError for unknown names.
    static Method parse(std::string_view name);

    friend bool operator==(const Method&, const Method&) = default;
};

/// The eight compared methods, single learners first.
std::vector<Method> all_methods();

struct MethodConfig {
    Method method;
    double budget = 0.01;
    int capacity = 10;
    bool seed_memory = true;  // memory-based methods start from the stream's initial set

    std::vector<int> hidden_dims{32, 32};
    double learning_rate = 0.01;
    int minibatch_size = 64;
    double slope = 0.01;

    StrategyParams strategy;
    int window = 300;

    int ensemble_size = 10;
    double beta = 0.5;
    WeightUpdateMode weight_update = WeightUpdateMode::queried;

    double fading = 0.99;
    std::uint64_t seed = 0;

    /// Throws ConfigError on values no run could use.
    void validate() const;
    LearnerConfig learner_config(int num_classes, int dim, std::uint64_t seed) const;
};

/// Builds the learner for `config` (an ensemble for WM methods) sized to the stream.
std::unique_ptr<Learner> make_learner(const MethodConfig& config, const StreamData& stream);

/// Error raised by a run; carries the failing step (0 = during setup).
class RunError : public std::runtime_error {
public:
    RunError(long step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

/**
 * The online loop. Per step: predict, score the prediction against the true
 * label, and, if the budget allows, compute the criterion and maybe query and
 * train; then update the budget estimate. Returns one row per step.
 */
std::vector<MetricsRow> run(const MethodConfig& config, const StreamData& stream);
std::vector<MetricsRow> run(Learner& learner, const MethodConfig& config, const StreamData& stream);

// ---------------------------------------------------------------------------
// Grid execution

/// One configuration of the grid, identified by name (usually the method name).
struct GridArm {
    std::string name;
    MethodConfig config;
};

using StreamFactory = std::function<StreamData(std::uint64_t seed)>;

struct RunResult {
    std::string arm;
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;
    std::optional<std::string> error;
};

struct GridResult {
    std::vector<RunResult> runs;  // arm-major, then seed order
    std::map<std::string, std::vector<AggregatePoint>> gmean;  // per arm, successful runs only
};

/// Seed of the learner for a given run seed; the stream uses the run seed itself.
std::uint64_t learner_seed(std::uint64_t run_seed);

/**
 * Runs every (arm, seed) pair independently on up to `jobs` threads. Results do
 * not depend on scheduling. A failing run is recorded and the grid continues.
 */
GridResult run_grid(std::span<const GridArm> arms, std::span<const std::uint64_t> seeds,
                    const StreamFactory& streams, int jobs);

} // namespace actisiamese

#endif // ACTISIAMESE_RUNNER_HPP
