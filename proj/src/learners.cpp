#include "actisiamese/learners.hpp"

namespace actisiamese {

namespace {

// Child seed streams drawn from a learner's seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

MultiQueue make_memory(const LearnerConfig& config, std::span<const LabeledInstance> initial) {
    if (initial.empty()) {
        return MultiQueue(config.num_classes, config.capacity);
    }
    return MultiQueue(config.num_classes, config.capacity, initial);
}

} // namespace

nn::NetworkSpec LearnerConfig::network_spec() const {
    nn::NetworkSpec spec;
    spec.input_dim = dim;
    spec.hidden_dims = hidden_dims;
    spec.slope = slope;
    spec.output = nn::OutputKind::softmax;
    spec.num_classes = num_classes;
    spec.learning_rate = learning_rate;
    spec.seed = mix_seed(seed, kInitStream);
    return spec;
}

Vector similarity_distribution(const SiamesePrediction& prediction) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(prediction.mean_similarity.size()));
    for (std::size_t c = 0; c < prediction.mean_similarity.size(); ++c) {
        if (prediction.mean_similarity[c]) {
            out(static_cast<Eigen::Index>(c)) = *prediction.mean_similarity[c];
        }
    }
    const double total = out.sum();
    if (total > 0.0) {
        out /= total;
    }
    return out;
}

// --------------------------------------------------------------------------

RvusLearner::RvusLearner(const LearnerConfig& config) : model_(config.network_spec()) {}

Prediction RvusLearner::predict(const Vector& x) {
    StandardPrediction p = model_.predict(x);
    return {p.label, std::move(p.probabilities), p.confidence};
}

void RvusLearner::learn(const Vector& x, int label) {
    model_.train_one(x, label);
    ++training_calls_;
}

// --------------------------------------------------------------------------

MemoryClassifierLearner::MemoryClassifierLearner(const LearnerConfig& config, Criterion criterion,
                                                 std::span<const LabeledInstance> initial)
    : config_(config),
      criterion_(criterion),
      model_(config.network_spec()),
      memory_(make_memory(config, initial)),
      rng_(mix_seed(config.seed, kShuffleStream)) {}

Prediction MemoryClassifierLearner::predict(const Vector& x) {
    StandardPrediction p = model_.predict(x);
    double criterion = p.confidence;
    if (criterion_ == Criterion::input_similarity) {
        // Nothing stored for the predicted class yet: treat as maximally novel.
        criterion = memory_.queue(p.label).empty() ? 0.0
                                                   : input_space_criterion(memory_, x, p.label);
    }
    return {p.label, std::move(p.probabilities), criterion};
}

void MemoryClassifierLearner::learn(const Vector& x, int label) {
    memory_.append(x, label);
    model_.train_on_memory(memory_, config_.minibatch_size, rng_);
    ++training_calls_;
}

// --------------------------------------------------------------------------

ActiSiameseLearner::ActiSiameseLearner(const LearnerConfig& config,
                                       std::span<const LabeledInstance> initial)
    : config_(config),
      model_(config.network_spec()),
      memory_(make_memory(config, initial)),
      rng_(mix_seed(config.seed, kShuffleStream)) {}

const MemoryEmbeddings& ActiSiameseLearner::memory_embeddings() {
    if (!cache_) {
        cache_ = model_.embed_memory(memory_);
    }
    return *cache_;
}

Prediction ActiSiameseLearner::predict(const Vector& x) {
    Prediction out;
    out.probabilities = Vector::Zero(config_.num_classes);
    if (memory_.empty()) {
        return out;
    }
    const SimilarityTable table = model_.similarities(memory_embeddings(), x);
    const SiamesePrediction p = siamese_predict(table);
    out.label = p.label;
    out.probabilities = similarity_distribution(p);
    out.criterion = siamese_criterion(table, p.label);
    return out;
}

void ActiSiameseLearner::learn(const Vector& x, int label) {
    memory_.append(x, label);
    cache_.reset();
    try {
        last_cost_ = model_.train(memory_, config_.minibatch_size, rng_);
        ++training_calls_;
    } catch (const InsufficientDataError&) {
        // Too few stored examples to form balanced pairs; wait for more labels.
    }
}

} // namespace actisiamese
