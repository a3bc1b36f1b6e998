#include "actisiamese/eval.hpp"

#include <algorithm>
#include <cmath>

#include "actisiamese/common.hpp"

namespace actisiamese {

PrequentialTracker::PrequentialTracker(int num_classes, double fading)
    : fading_(fading),
      seen_(static_cast<std::size_t>(std::max(num_classes, 0)), 0.0),
      hits_(seen_.size(), 0.0),
      observed_(seen_.size(), false) {
    if (num_classes < 1) {
        throw ConfigError("tracker needs at least one class");
    }
    if (!(fading > 0.0 && fading <= 1.0)) {
        throw ConfigError("fading factor must lie in (0, 1]");
    }
}

void PrequentialTracker::update(int truth, std::optional<int> predicted) {
    if (truth < 0 || truth >= num_classes()) {
        throw InputError("true class outside the tracker's range");
    }
    if (predicted && (*predicted < 0 || *predicted >= num_classes())) {
        throw InputError("predicted class outside the tracker's range");
    }
    for (std::size_t c = 0; c < seen_.size(); ++c) {
        seen_[c] *= fading_;
        hits_[c] *= fading_;
    }
    total_seen_ *= fading_;
    total_hits_ *= fading_;

    const auto k = static_cast<std::size_t>(truth);
    const double hit = (predicted && *predicted == truth) ? 1.0 : 0.0;
    seen_[k] += 1.0;
    hits_[k] += hit;
    observed_[k] = true;
    total_seen_ += 1.0;
    total_hits_ += hit;
}

std::optional<double> PrequentialTracker::recall(int label) const {
    const auto k = static_cast<std::size_t>(label);
    if (!observed_.at(k) || !(seen_[k] > 0.0)) {
        return std::nullopt;
    }
    return hits_[k] / seen_[k];
}

double PrequentialTracker::gmean() const {
    std::vector<double> recalls;
    recalls.reserve(seen_.size());
    for (int c = 0; c < num_classes(); ++c) {
        if (const auto r = recall(c)) {
            recalls.push_back(*r);
        }
    }
    return gmean_of(recalls);
}

double PrequentialTracker::accuracy() const {
    return total_seen_ > 0.0 ? total_hits_ / total_seen_ : 0.0;
}

double gmean_of(std::span<const double> recalls) {
    if (recalls.empty()) {
        return 0.0;
    }
    double product = 1.0;
    for (double r : recalls) {
        product *= r;
    }
    return std::pow(product, 1.0 / static_cast<double>(recalls.size()));
}

std::vector<AggregatePoint> aggregate_runs(std::span<const std::vector<double>> runs) {
    if (runs.empty()) {
        return {};
    }
    const std::size_t length = runs.front().size();
    for (const auto& r : runs) {
        if (r.size() != length) {
            throw AggregationError("runs differ in length");
        }
    }
    const auto count = static_cast<double>(runs.size());
    std::vector<AggregatePoint> out(length);
    for (std::size_t i = 0; i < length; ++i) {
        double sum = 0.0;
        for (const auto& r : runs) {
            sum += r[i];
        }
        const double mean = sum / count;
        double squares = 0.0;
        for (const auto& r : runs) {
            squares += (r[i] - mean) * (r[i] - mean);
        }
        out[i].mean = mean;
        out[i].std_error = runs.size() > 1 ? std::sqrt(squares / (count - 1.0)) / std::sqrt(count) : 0.0;
    }
    return out;
}

} // namespace actisiamese
