#ifndef ACTISIAMESE_ENSEMBLE_HPP
#define ACTISIAMESE_ENSEMBLE_HPP

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "actisiamese/learners.hpp"
#include "actisiamese/memory.hpp"

namespace actisiamese {

/// One member's vote: a class (absent when the member cannot predict) and a distribution.
struct MemberOutput {
    std::optional<int> label;
    Vector probabilities;
};

struct EnsembleOutput {
    int label = 0;
    Vector average;  // weighted average distribution over contributing members
};

/**
 * Weighted Majority combination of member distributions.
 *
 * Weights start equal, are multiplied by exp(-beta * z_i) for a 0/1 loss z_i,
 * and are renormalized to sum 1 after every update. The weighted average is
 * scale-invariant, so the renormalization is not observable in predictions.
 */
class WeightedMajority {
public:
    WeightedMajority(int members, double beta);

    /// Members without a label are excluded; throws NoPredictionError if none remain.
    EnsembleOutput combine(std::span<const MemberOutput> outputs) const;

    void update(std::span<const int> zero_one_losses);

    std::span<const double> weights() const { return weights_; }
    void set_weights(std::vector<double> weights);
    double beta() const { return beta_; }

    /// Querying criterion: the largest averaged class probability.
    static double criterion(const Vector& average);

private:
    std::vector<double> weights_;
    double beta_;
};

enum class WeightUpdateMode {
    queried,     // weights move only on steps whose label was queried
    every_step,  // weights move on every step using the evaluator's label
};

enum class EnsembleCriterion {
    max_average_probability,  // largest weighted-average class probability
    input_similarity,         // input-space cosine to the predicted class queue
};

/// N independently seeded members behind one shared query strategy.
class EnsembleLearner : public Learner {
public:
    /// `mirror` must be provided (with the members' initial data) for input_similarity.
    EnsembleLearner(std::vector<std::unique_ptr<Learner>> members, double beta,
                    WeightUpdateMode mode, EnsembleCriterion criterion,
                    std::optional<MultiQueue> mirror = std::nullopt);

    Prediction predict(const Vector& x) override;

    /// Applies the weight update (queried mode), then trains every member.
    void learn(const Vector& x, int label) override;
    void reveal(int label) override;

    const WeightedMajority& weighting() const { return weighting_; }
    std::span<const std::unique_ptr<Learner>> members() const { return members_; }

private:
    void update_weights(int label);

    std::vector<std::unique_ptr<Learner>> members_;
    WeightedMajority weighting_;
    WeightUpdateMode mode_;
    EnsembleCriterion criterion_;
    std::optional<MultiQueue> mirror_;
    std::vector<MemberOutput> last_outputs_;
};

} // namespace actisiamese

#endif // ACTISIAMESE_ENSEMBLE_HPP
