#ifndef ACTISIAMESE_LEARNERS_HPP
#define ACTISIAMESE_LEARNERS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "actisiamese/common.hpp"
#include "actisiamese/memory.hpp"
#include "actisiamese/models.hpp"

namespace actisiamese {

/// Hyper-parameters shared by every learner family.
struct LearnerConfig {
    int num_classes = 2;
    int dim = 2;
    std::vector<int> hidden_dims{32, 32};
    double learning_rate = 0.01;
    int minibatch_size = 64;
    double slope = 0.01;
    int capacity = 10;  // per-class queue length; unused by one-pass learners
    std::uint64_t seed = 0;

    nn::NetworkSpec network_spec() const;
};

/// What a learner knows about an arriving instance before seeing its label.
struct Prediction {
    std::optional<int> label;  // empty when the learner cannot predict yet
    Vector probabilities;      // per-class distribution; all zero without a prediction
    double criterion = 0.0;    // querying criterion in [0, 1]; 0 without a prediction
};

/**
 * A one-by-one online learner. The runner calls predict() on every instance
 * and learn() only after a granted label query, with the same instance that
 * was last predicted.
 */
class Learner {
public:
    virtual ~Learner() = default;

    virtual Prediction predict(const Vector& x) = 0;
    virtual void learn(const Vector& x, int label) = 0;

    /// The evaluator's label for the last predicted instance. Most learners ignore it.
    virtual void reveal(int /*label*/) {}

    /// Number of training updates performed so far.
    long training_calls() const { return training_calls_; }

protected:
    long training_calls_ = 0;
};

/// One-pass learner with uncertainty sampling: standard network, no memory.
class RvusLearner : public Learner {
public:
    explicit RvusLearner(const LearnerConfig& config);

    Prediction predict(const Vector& x) override;
    void learn(const Vector& x, int label) override;

    const StandardModel& model() const { return model_; }

private:
    StandardModel model_;
};

/// Standard network trained on the multi-queue memory. Criterion is either the
/// max class probability (uncertainty) or the input-space cosine similarity.
class MemoryClassifierLearner : public Learner {
public:
    enum class Criterion { uncertainty, input_similarity };

    MemoryClassifierLearner(const LearnerConfig& config, Criterion criterion,
                            std::span<const LabeledInstance> initial = {});

    Prediction predict(const Vector& x) override;
    void learn(const Vector& x, int label) override;

    const StandardModel& model() const { return model_; }
    const MultiQueue& memory() const { return memory_; }

private:
    LearnerConfig config_;
    Criterion criterion_;
    StandardModel model_;
    MultiQueue memory_;
    std::mt19937_64 rng_;
};

/// Siamese network over the multi-queue memory with latent-space similarity sampling.
class ActiSiameseLearner : public Learner {
public:
    explicit ActiSiameseLearner(const LearnerConfig& config,
                                std::span<const LabeledInstance> initial = {});

    Prediction predict(const Vector& x) override;
    void learn(const Vector& x, int label) override;

    const SiameseModel& model() const { return model_; }
    const MultiQueue& memory() const { return memory_; }
    /// Cost of the last completed training call, if any.
    std::optional<double> last_cost() const { return last_cost_; }

private:
    const MemoryEmbeddings& memory_embeddings();

    LearnerConfig config_;
    SiameseModel model_;
    MultiQueue memory_;
    std::mt19937_64 rng_;
    std::optional<MemoryEmbeddings> cache_;
    std::optional<double> last_cost_;
};

/// Per-class mean similarities normalized to sum 1; empty queues get 0.
Vector similarity_distribution(const SiamesePrediction& prediction);

} // namespace actisiamese

#endif // ACTISIAMESE_LEARNERS_HPP
