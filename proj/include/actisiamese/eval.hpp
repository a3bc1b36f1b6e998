#ifndef ACTISIAMESE_EVAL_HPP
#define ACTISIAMESE_EVAL_HPP

#include <optional>
#include <span>
#include <vector>

namespace actisiamese {

/**
 * Prequential (test-then-train) recall tracker with a fading factor.
 *
 * Each update first multiplies every class's occurrence and hit counts by xi,
 * then adds the new observation. With xi = 1 the recalls are exact.
 */
class PrequentialTracker {
public:
    PrequentialTracker(int num_classes, double fading);

    /// An absent prediction counts as a miss.
    void update(int truth, std::optional<int> predicted);

    int num_classes() const { return static_cast<int>(seen_.size()); }
    double fading() const { return fading_; }
    double occurrences(int label) const { return seen_.at(static_cast<std::size_t>(label)); }
    double hits(int label) const { return hits_.at(static_cast<std::size_t>(label)); }
    bool observed(int label) const { return observed_.at(static_cast<std::size_t>(label)); }

    /// Recall of one class; empty until the class has been observed.
    std::optional<double> recall(int label) const;

    /// Geometric mean of recalls. Until every class has been observed the mean
    /// runs over observed classes only; 0 before anything is observed.
    double gmean() const;

    /// Faded fraction of correct predictions.
    double accuracy() const;

private:
    double fading_;
    std::vector<double> seen_;
    std::vector<double> hits_;
    std::vector<bool> observed_;
    double total_seen_ = 0.0;
    double total_hits_ = 0.0;
};

/// Geometric mean of a list of recalls.
double gmean_of(std::span<const double> recalls);

struct MetricsRow {
    long t = 0;
    double gmean = 0.0;
    double accuracy = 0.0;
    long labels_spent = 0;
    double b_hat = 0.0;
    double theta = 0.0;
};

struct AggregatePoint {
    double mean = 0.0;
    double std_error = 0.0;  // sample sd / sqrt(R); 0 when R == 1
};

/// Per-index mean and standard error across equal-length runs.
std::vector<AggregatePoint> aggregate_runs(std::span<const std::vector<double>> runs);

} // namespace actisiamese

#endif // ACTISIAMESE_EVAL_HPP
