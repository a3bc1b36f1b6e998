#include "actisiamese/active.hpp"

#include <algorithm>
#include <cmath>

#include "actisiamese/common.hpp"

namespace actisiamese {

ThresholdStrategy::ThresholdStrategy(const StrategyParams& params, std::uint64_t seed)
    : params_(params), theta_(params.theta), rng_(seed), eta_(1.0, params.delta > 0 ? params.delta : 1.0) {
    if (!(params.theta > 0.0 && params.theta <= kThetaMax)) {
        throw ConfigError("initial threshold must lie in (0, 1]");
    }
    if (!(params.step > 0.0)) {
        throw ConfigError("threshold step size must be positive");
    }
    if (!(params.delta >= 0.0) || !std::isfinite(params.delta)) {
        throw ConfigError("randomisation spread must be non-negative");
    }
    theta_ = std::clamp(theta_, kThetaMin, kThetaMax);
}

bool ThresholdStrategy::decide(double criterion) {
    if (params_.mode == StrategyMode::fixed) {
        return criterion < theta_;
    }
    // delta == 0 degenerates to the deterministic variable threshold.
    const double eta = params_.delta > 0.0 ? std::max(0.0, eta_(rng_)) : 1.0;
    const bool query = criterion < theta_ * eta;
    theta_ *= query ? (1.0 - params_.step) : (1.0 + params_.step);
    theta_ = std::clamp(theta_, kThetaMin, kThetaMax);
    return query;
}

BudgetEstimator::BudgetEstimator(double budget, int window)
    : budget_(budget), window_(window), decay_(0.0) {
    if (!(budget >= 0.0 && budget <= 1.0)) {
        throw ConfigError("budget must lie in [0, 1]");
    }
    if (window < 2) {
        throw ConfigError("budget window must be at least 2 steps");
    }
    decay_ = static_cast<double>(window - 1) / static_cast<double>(window);
}

} // namespace actisiamese
