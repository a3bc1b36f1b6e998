#ifndef ACTISIAMESE_ACTIVE_HPP
#define ACTISIAMESE_ACTIVE_HPP

#include <cstdint>
#include <random>

namespace actisiamese {

enum class StrategyMode { fixed, randomised_variable };

struct StrategyParams {
    StrategyMode mode = StrategyMode::randomised_variable;
    double theta = 1.0;  // initial threshold
    double step = 0.01;  // s
    double delta = 1.0;  // spread of the threshold multiplier
};

/**
 * Threshold querying rule over a criterion value v in [0, 1].
 *
 * Fixed mode queries iff v < theta. Randomised-variable mode draws
 * eta ~ N(1, delta) per decision (negative draws clamp to 0), queries iff
 * v < theta * eta, then shrinks theta by (1 - s) after a query and grows it by
 * (1 + s) otherwise, clamped to [kThetaMin, kThetaMax].
 */
class ThresholdStrategy {
public:
    static constexpr double kThetaMin = 1e-4;
    static constexpr double kThetaMax = 1.0;

    ThresholdStrategy(const StrategyParams& params, std::uint64_t seed);

    bool decide(double criterion);

    double theta() const { return theta_; }
    const StrategyParams& params() const { return params_; }

private:
    StrategyParams params_;
    double theta_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> eta_;
};

/// Faded estimate of the labelling spend over a window of `window` steps.
class BudgetEstimator {
public:
    BudgetEstimator(double budget, int window);

    /// True iff the estimated spend is strictly below the budget.
    bool allows() const { return spending() < budget_; }

    void update(bool labelled) { faded_count_ = decay_ * faded_count_ + (labelled ? 1.0 : 0.0); }

    double spending() const { return faded_count_ / window_; }
    double faded_count() const { return faded_count_; }
    double budget() const { return budget_; }
    int window() const { return window_; }
    double decay() const { return decay_; }

private:
    double budget_;
    int window_;
    double decay_;
    double faded_count_ = 0.0;
};

} // namespace actisiamese

#endif // ACTISIAMESE_ACTIVE_HPP
