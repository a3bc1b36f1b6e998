#ifndef ACTISIAMESE_MODELS_HPP
#define ACTISIAMESE_MODELS_HPP

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "actisiamese/common.hpp"
#include "actisiamese/memory.hpp"
#include "actisiamese/nn.hpp"

namespace actisiamese {

/// Index of the largest entry; ties go to the smallest index.
int argmax_first(const Vector& values);

// ---------------------------------------------------------------------------
// Training pairs
// ---------------------------------------------------------------------------

/// Position of a stored vector: class queue and index within that queue.
struct ItemRef {
    int label = 0;
    int index = 0;

    friend bool operator==(const ItemRef&, const ItemRef&) = default;
    friend auto operator<=>(const ItemRef&, const ItemRef&) = default;
};

using ItemPair = std::pair<ItemRef, ItemRef>;

/// Balanced selection of same-class (positive) and cross-class (negative) unordered pairs.
struct PairSelection {
    std::vector<ItemPair> positives;
    std::vector<ItemPair> negatives;
};

/**
 * Enumerates every unordered pair in the memory, keeps all same-class pairs and
 * a uniform sample (without replacement) of equally many cross-class pairs. If
 * cross-class pairs are the scarcer kind, all of them are kept and the positives
 * are downsampled instead. Within a pair, `first` precedes `second` in snapshot order.
 *
 * Throws InsufficientDataError if either kind of pair is missing.
 */
PairSelection select_pairs(const MultiQueue& memory, std::mt19937_64& rng);

struct PairBatch {
    Matrix left;
    Matrix right;
    Vector labels;  // 1 = same class, 0 = different classes

    Eigen::Index size() const { return labels.size(); }
};

PairBatch materialize_pairs(const MultiQueue& memory, const PairSelection& selection);
PairBatch build_pairs(const MultiQueue& memory, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Siamese similarity classifier
// ---------------------------------------------------------------------------

/// Similarity of one query to every stored vector, grouped by class queue.
using SimilarityTable = std::vector<std::vector<double>>;

/// Embeddings of every stored vector, one matrix (rows = queue order) per class.
struct MemoryEmbeddings {
    std::vector<Matrix> per_class;
};

struct SiamesePrediction {
    int label = 0;
    /// Mean similarity per class; empty for classes whose queue is empty.
    std::vector<std::optional<double>> mean_similarity;
};

class SiameseModel {
public:
    /// The encoder is `spec` without its output layer: the last hidden layer is the embedding.
    /// The head is a sigmoid unit over the element-wise absolute embedding difference.
    explicit SiameseModel(nn::NetworkSpec spec);

    const nn::DenseNetwork& encoder() const { return encoder_; }
    const nn::DenseLayer& head() const { return head_; }
    nn::DenseLayer& mutable_head() { return head_; }
    int embedding_dim() const { return static_cast<int>(head_.weights.rows()); }

    Matrix embed(const Matrix& rows) const;
    Vector embed(const Vector& x) const;
    MemoryEmbeddings embed_memory(const MultiQueue& memory) const;

    double similarity_of_embeddings(const Vector& a, const Vector& b) const;
    double pair_similarity(const Vector& a, const Vector& b) const;

    SimilarityTable similarities(const MemoryEmbeddings& memory, const Vector& x) const;
    SimilarityTable similarities(const MultiQueue& memory, const Vector& x) const;

    struct LossGradient {
        double loss = 0.0;
        nn::Gradient encoder;
        nn::DenseLayer head;
    };

    /// Mean binary cross-entropy over the pairs and its exact gradient.
    LossGradient loss_and_gradient(const Matrix& left, const Matrix& right,
                                   const Vector& labels) const;

    /// One Adam step on encoder and head jointly.
    void apply(const LossGradient& grad);

    /// One shuffled epoch of mini-batch training; returns the mean pre-update cost.
    double train_on_pairs(const PairBatch& pairs, int minibatch_size, std::mt19937_64& rng);

    /// build_pairs followed by train_on_pairs. Propagates InsufficientDataError.
    double train(const MultiQueue& memory, int minibatch_size, std::mt19937_64& rng);

private:
    nn::DenseNetwork encoder_;
    nn::DenseLayer head_;
    nn::LayerMoments head_moments_;
    nn::AdamConfig adam_;
    long head_step_ = 0;
};

/// Class with the highest mean similarity among non-empty queues.
SiamesePrediction siamese_predict(const SimilarityTable& table);
SiamesePrediction siamese_predict(const SiameseModel& model, const MultiQueue& memory,
                                  const Vector& x);

/// Largest similarity to the queue of `predicted`.
double siamese_criterion(const SimilarityTable& table, int predicted);
double siamese_criterion(const SiameseModel& model, const MultiQueue& memory, const Vector& x,
                         int predicted);

// ---------------------------------------------------------------------------
// Standard softmax classifier
// ---------------------------------------------------------------------------

struct StandardPrediction {
    int label = 0;
    Vector probabilities;
    double confidence = 0.0;  // max probability
};

class StandardModel {
public:
    /// Forces a softmax output of spec.num_classes units.
    explicit StandardModel(nn::NetworkSpec spec);

    const nn::DenseNetwork& network() const { return net_; }
    int num_classes() const { return net_.spec().num_classes; }

    StandardPrediction predict(const Vector& x) const;

    /// One epoch of categorical cross-entropy over every stored example.
    double train_on_memory(const MultiQueue& memory, int minibatch_size, std::mt19937_64& rng);

    /// A single gradient step on one example; returns its pre-update cost.
    double train_one(const Vector& x, int label);

private:
    nn::DenseNetwork net_;
};

double cosine_similarity(const Vector& a, const Vector& b);

/// Max cosine similarity to the predicted class queue, rescaled from [-1, 1] to [0, 1].
/// Zero-norm vectors count as cosine 0.
double input_space_criterion(const MultiQueue& memory, const Vector& x, int predicted);

} // namespace actisiamese

#endif // ACTISIAMESE_MODELS_HPP
