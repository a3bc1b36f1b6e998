#include "actisiamese/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace actisiamese {

std::string Method::name() const {
    std::string base;
    switch (kind) {
    case MethodKind::rvus:
        base = "rvus";
        break;
    case MethodKind::actiq:
        base = "actiq";
        break;
    case MethodKind::rvss:
        base = "rvss";
        break;
    case MethodKind::actisiamese:
        base = "actisiamese";
        break;
    }
    return ensemble ? base + "-wm" : base;
}

Method Method::parse(std::string_view name) {
    for (const Method& m : all_methods()) {
        if (m.name() == name) {
            return m;
        }
    }
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> all_methods() {
    std::vector<Method> out;
    for (bool ensemble : {false, true}) {
        for (MethodKind kind :
             {MethodKind::rvus, MethodKind::actiq, MethodKind::rvss, MethodKind::actisiamese}) {
            out.push_back({kind, ensemble});
        }
    }
    return out;
}

void MethodConfig::validate() const {
    if (!(budget >= 0.0 && budget <= 1.0)) {
        throw ConfigError("budget must lie in [0, 1]");
    }
    if (method.memory_based() && capacity < 1) {
        throw ConfigError("queue capacity must be at least 1 for memory-based methods");
    }
    if (hidden_dims.empty() ||
        std::any_of(hidden_dims.begin(), hidden_dims.end(), [](int w) { return w <= 0; })) {
        throw ConfigError("hidden layer widths must be positive and non-empty");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
    if (minibatch_size < 1) {
        throw ConfigError("mini-batch size must be at least 1");
    }
    if (!(slope > 0.0 && slope < 1.0)) {
        throw ConfigError("leaky-ReLU slope must lie in (0, 1)");
    }
    if (window < 2) {
        throw ConfigError("budget window must be at least 2 steps");
    }
    if (method.ensemble && ensemble_size < 1) {
        throw ConfigError("ensemble size must be at least 1");
    }
    if (!(beta >= 0.0)) {
        throw ConfigError("weighted-majority beta must be non-negative");
    }
    if (!(fading > 0.0 && fading <= 1.0)) {
        throw ConfigError("fading factor must lie in (0, 1]");
    }
    ThresholdStrategy probe(strategy, 0);  // validates the strategy parameters
    (void)probe;
}

LearnerConfig MethodConfig::learner_config(int num_classes, int dim, std::uint64_t member_seed) const {
    LearnerConfig lc;
    lc.num_classes = num_classes;
    lc.dim = dim;
    lc.hidden_dims = hidden_dims;
    lc.learning_rate = learning_rate;
    lc.minibatch_size = minibatch_size;
    lc.slope = slope;
    lc.capacity = capacity;
    lc.seed = member_seed;
    return lc;
}

namespace {

std::unique_ptr<Learner> make_single(MethodKind kind, const LearnerConfig& lc,
                                     std::span<const LabeledInstance> initial) {
    switch (kind) {
    case MethodKind::rvus:
        return std::make_unique<RvusLearner>(lc);
    case MethodKind::actiq:
        return std::make_unique<MemoryClassifierLearner>(
            lc, MemoryClassifierLearner::Criterion::uncertainty, initial);
    case MethodKind::rvss:
        return std::make_unique<MemoryClassifierLearner>(
            lc, MemoryClassifierLearner::Criterion::input_similarity, initial);
    case MethodKind::actisiamese:
        return std::make_unique<ActiSiameseLearner>(lc, initial);
    }
    throw ConfigError("unknown method kind");
}

// Member i of an ensemble draws from stream i of the learner seed; a single
// learner is member 0, so a one-member ensemble matches the bare learner.
std::uint64_t member_seed(std::uint64_t seed, int member) {
    return mix_seed(seed, 100 + static_cast<std::uint64_t>(member));
}

} // namespace

std::unique_ptr<Learner> make_learner(const MethodConfig& config, const StreamData& stream) {
    config.validate();
    if (stream.num_classes < 2 || stream.dim < 1) {
        throw ConfigError("stream must have at least two classes and one feature");
    }
    std::span<const LabeledInstance> initial;
    if (config.method.memory_based() && config.seed_memory) {
        initial = stream.initial;
    }
    if (!initial.empty() &&
        static_cast<int>(initial.size()) != stream.num_classes * config.capacity) {
        throw ConfigError("initial set holds " + std::to_string(initial.size()) +
                          " examples; memory expects " +
                          std::to_string(stream.num_classes * config.capacity));
    }

    if (!config.method.ensemble) {
        return make_single(config.method.kind,
                           config.learner_config(stream.num_classes, stream.dim,
                                                 member_seed(config.seed, 0)),
                           initial);
    }
    std::vector<std::unique_ptr<Learner>> members;
    for (int i = 0; i < config.ensemble_size; ++i) {
        members.push_back(make_single(
            config.method.kind,
            config.learner_config(stream.num_classes, stream.dim, member_seed(config.seed, i)),
            initial));
    }
    std::optional<MultiQueue> mirror;
    EnsembleCriterion criterion = EnsembleCriterion::max_average_probability;
    if (config.method.kind == MethodKind::rvss) {
        criterion = EnsembleCriterion::input_similarity;
        mirror = initial.empty() ? MultiQueue(stream.num_classes, config.capacity)
                                 : MultiQueue(stream.num_classes, config.capacity, initial);
    }
    return std::make_unique<EnsembleLearner>(std::move(members), config.beta,
                                             config.weight_update, criterion, std::move(mirror));
}

std::vector<MetricsRow> run(Learner& learner, const MethodConfig& config,
                            const StreamData& stream) {
    ThresholdStrategy strategy(config.strategy, mix_seed(config.seed, 7));
    BudgetEstimator budget(config.budget, config.window);
    PrequentialTracker tracker(stream.num_classes, config.fading);

    std::vector<MetricsRow> rows;
    rows.reserve(stream.instances.size());
    long labels = 0;
    long t = 0;
    try {
        for (const auto& item : stream.instances) {
            ++t;
            const Prediction p = learner.predict(item.x);
            tracker.update(item.label, p.label);
            learner.reveal(item.label);

            bool queried = false;
            if (budget.allows() && strategy.decide(p.criterion)) {
                queried = true;
                ++labels;
                learner.learn(item.x, item.label);
            }
            budget.update(queried);
            rows.push_back({t, tracker.gmean(), tracker.accuracy(), labels, budget.spending(),
                            strategy.theta()});
        }
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError(t, e.what());
    }
    return rows;
}

std::vector<MetricsRow> run(const MethodConfig& config, const StreamData& stream) {
    std::unique_ptr<Learner> learner;
    try {
        learner = make_learner(config, stream);
    } catch (const std::exception& e) {
        throw RunError(0, e.what());
    }
    return run(*learner, config, stream);
}

std::uint64_t learner_seed(std::uint64_t run_seed) { return mix_seed(run_seed, 0x5eed); }

GridResult run_grid(std::span<const GridArm> arms, std::span<const std::uint64_t> seeds,
                    const StreamFactory& streams, int jobs) {
    GridResult result;
    result.runs.resize(arms.size() * seeds.size());
    for (std::size_t a = 0; a < arms.size(); ++a) {
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            auto& r = result.runs[a * seeds.size() + s];
            r.arm = arms[a].name;
            r.seed = seeds[s];
        }
    }

    auto execute = [&](std::size_t index) {
        auto& r = result.runs[index];
        const GridArm& arm = arms[index / seeds.size()];
        try {
            MethodConfig config = arm.config;
            config.seed = learner_seed(r.seed);
            r.rows = run(config, streams(r.seed));
        } catch (const std::exception& e) {
            r.error = e.what();
            r.rows.clear();
        }
    };

    const std::size_t total = result.runs.size();
    const std::size_t workers =
        std::min<std::size_t>(total, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) {
            execute(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < total; i = next++) {
                    execute(i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    for (const GridArm& arm : arms) {
        std::vector<std::vector<double>> curves;
        for (const auto& r : result.runs) {
            if (r.arm == arm.name && !r.error) {
                std::vector<double> curve;
                curve.reserve(r.rows.size());
                for (const auto& row : r.rows) {
                    curve.push_back(row.gmean);
                }
                curves.push_back(std::move(curve));
            }
        }
        try {
            result.gmean[arm.name] = aggregate_runs(curves);
        } catch (const AggregationError&) {
            result.gmean[arm.name] = {};
        }
    }
    return result;
}

} // namespace actisiamese
