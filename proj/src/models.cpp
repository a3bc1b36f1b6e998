#include "actisiamese/models.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

namespace actisiamese {

int argmax_first(const Vector& values) {
    if (values.size() == 0) {
        throw PreconditionError("argmax of an empty vector");
    }
    int best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (values(i) > values(best)) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Pairs

PairSelection select_pairs(const MultiQueue& memory, std::mt19937_64& rng) {
    std::vector<ItemRef> items;
    items.reserve(memory.size());
    for (int c = 0; c < memory.num_classes(); ++c) {
        const int n = static_cast<int>(memory.queue(c).size());
        for (int i = 0; i < n; ++i) {
            items.push_back({c, i});
        }
    }

    PairSelection all;
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            auto& bucket = items[i].label == items[j].label ? all.positives : all.negatives;
            bucket.emplace_back(items[i], items[j]);
        }
    }
    if (all.positives.empty()) {
        throw InsufficientDataError("memory holds no same-class pair");
    }
    if (all.negatives.empty()) {
        throw InsufficientDataError("memory holds no cross-class pair");
    }

    PairSelection out;
    if (all.negatives.size() >= all.positives.size()) {
        out.positives = std::move(all.positives);
        std::sample(all.negatives.begin(), all.negatives.end(),
                    std::back_inserter(out.negatives), out.positives.size(), rng);
    } else {
        out.negatives = std::move(all.negatives);
        std::sample(all.positives.begin(), all.positives.end(),
                    std::back_inserter(out.positives), out.negatives.size(), rng);
    }
    return out;
}

PairBatch materialize_pairs(const MultiQueue& memory, const PairSelection& selection) {
    const auto total =
        static_cast<Eigen::Index>(selection.positives.size() + selection.negatives.size());
    const int dim = memory.dim();
    PairBatch batch{Matrix(total, dim), Matrix(total, dim), Vector(total)};

    Eigen::Index row = 0;
    auto emit = [&](const ItemPair& p, double label) {
        batch.left.row(row) = memory.queue(p.first.label)[static_cast<std::size_t>(p.first.index)];
        batch.right.row(row) =
            memory.queue(p.second.label)[static_cast<std::size_t>(p.second.index)];
        batch.labels(row) = label;
        ++row;
    };
    for (const auto& p : selection.positives) {
        emit(p, 1.0);
    }
    for (const auto& p : selection.negatives) {
        emit(p, 0.0);
    }
    return batch;
}

PairBatch build_pairs(const MultiQueue& memory, std::mt19937_64& rng) {
    return materialize_pairs(memory, select_pairs(memory, rng));
}

// ---------------------------------------------------------------------------
// Siamese

namespace {

nn::NetworkSpec as_encoder(nn::NetworkSpec spec) {
    spec.output = nn::OutputKind::embedding;
    return spec;
}

Matrix stack_rows(const std::deque<Vector>& rows, int dim) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return out;
}

} // namespace

SiameseModel::SiameseModel(nn::NetworkSpec spec) : encoder_(as_encoder(spec)) {
    adam_.learning_rate = spec.learning_rate;
    std::mt19937_64 rng(mix_seed(spec.seed, 0x4ead));
    head_ = nn::he_normal_layer(spec.hidden_dims.back(), 1, rng);
    head_moments_ = nn::LayerMoments::zeros_like(head_);
}

Matrix SiameseModel::embed(const Matrix& rows) const { return encoder_.predict(rows); }

Vector SiameseModel::embed(const Vector& x) const {
    return encoder_.predict(x.transpose()).row(0).transpose();
}

MemoryEmbeddings SiameseModel::embed_memory(const MultiQueue& memory) const {
    MemoryEmbeddings out;
    out.per_class.reserve(static_cast<std::size_t>(memory.num_classes()));
    for (int c = 0; c < memory.num_classes(); ++c) {
        const auto& q = memory.queue(c);
        if (q.empty()) {
            out.per_class.emplace_back(0, embedding_dim());
        } else {
            out.per_class.push_back(embed(stack_rows(q, memory.dim())));
        }
    }
    return out;
}

double SiameseModel::similarity_of_embeddings(const Vector& a, const Vector& b) const {
    const double logit = (a - b).cwiseAbs().dot(head_.weights.col(0)) + head_.bias(0);
    return nn::sigmoid(logit);
}

double SiameseModel::pair_similarity(const Vector& a, const Vector& b) const {
    if (a.size() != b.size()) {
        throw ShapeError("pair_similarity: vectors differ in dimension");
    }
    return similarity_of_embeddings(embed(a), embed(b));
}

SimilarityTable SiameseModel::similarities(const MemoryEmbeddings& memory, const Vector& x) const {
    const Vector ex = embed(x);
    SimilarityTable table(memory.per_class.size());
    for (std::size_t c = 0; c < memory.per_class.size(); ++c) {
        const Matrix& e = memory.per_class[c];
        if (e.rows() == 0) {
            continue;
        }
        const Matrix diff = (e.rowwise() - ex.transpose()).cwiseAbs();
        const Vector logits = (diff * head_.weights.col(0)).array() + head_.bias(0);
        table[c].reserve(static_cast<std::size_t>(logits.size()));
        for (Eigen::Index i = 0; i < logits.size(); ++i) {
            table[c].push_back(nn::sigmoid(logits(i)));
        }
    }
    return table;
}

SimilarityTable SiameseModel::similarities(const MultiQueue& memory, const Vector& x) const {
    if (memory.dim() != 0 && x.size() != memory.dim()) {
        throw ShapeError("similarities: query dimension differs from memory");
    }
    return similarities(embed_memory(memory), x);
}

SiameseModel::LossGradient SiameseModel::loss_and_gradient(const Matrix& left, const Matrix& right,
                                                           const Vector& labels) const {
    const Eigen::Index n = labels.size();
    if (left.rows() != n || right.rows() != n || left.cols() != right.cols()) {
        throw ShapeError("siamese batch: left/right/labels disagree in shape");
    }
    if (n == 0) {
        throw PreconditionError("siamese batch is empty");
    }
    // Both twins share weights, so run them as one stacked batch.
    Matrix stacked(2 * n, left.cols());
    stacked.topRows(n) = left;
    stacked.bottomRows(n) = right;
    const nn::Activations acts = encoder_.forward(stacked);
    const Matrix diff = acts.output.topRows(n) - acts.output.bottomRows(n);
    const Matrix abs_diff = diff.cwiseAbs();

    Vector logits = abs_diff * head_.weights.col(0);
    logits.array() += head_.bias(0);
    const Vector p = logits.unaryExpr([](double z) { return nn::sigmoid(z); });

    LossGradient out;
    out.loss = nn::loss(nn::LossKind::binary_cross_entropy, p, labels);

    const Vector delta = (p - labels) / static_cast<double>(n);
    out.head.weights = abs_diff.transpose() * delta;
    out.head.bias = Vector::Constant(1, delta.sum());

    const Matrix d_abs = delta * head_.weights.col(0).transpose();
    const Matrix d_diff = d_abs.binaryExpr(diff, [](double g, double d) {
        return d > 0.0 ? g : (d < 0.0 ? -g : 0.0);
    });
    Matrix d_out(2 * n, d_diff.cols());
    d_out.topRows(n) = d_diff;
    d_out.bottomRows(n) = -d_diff;
    out.encoder = encoder_.backward_from_output(acts, d_out);
    return out;
}

void SiameseModel::apply(const LossGradient& grad) {
    if (!grad.head.weights.allFinite() || !grad.head.bias.allFinite()) {
        throw NumericError("siamese head: non-finite gradient");
    }
    encoder_.adam_step(grad.encoder);
    ++head_step_;
    nn::adam_update(head_, head_moments_, grad.head, adam_, head_step_);
}

double SiameseModel::train_on_pairs(const PairBatch& pairs, int minibatch_size,
                                    std::mt19937_64& rng) {
    if (pairs.size() == 0) {
        throw PreconditionError("siamese training set is empty");
    }
    if (minibatch_size <= 0) {
        throw ConfigError("mini-batch size must be positive");
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(pairs.size()));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    double weighted_cost = 0.0;
    const auto batch = static_cast<std::size_t>(minibatch_size);
    for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t count = std::min(batch, order.size() - start);
        const std::span<const std::size_t> rows(order.data() + start, count);
        const Matrix labels = nn::gather_rows(pairs.labels, rows);
        const LossGradient grad = loss_and_gradient(nn::gather_rows(pairs.left, rows),
                                                    nn::gather_rows(pairs.right, rows),
                                                    labels.col(0));
        weighted_cost += grad.loss * static_cast<double>(count);
        apply(grad);
    }
    return weighted_cost / static_cast<double>(order.size());
}

double SiameseModel::train(const MultiQueue& memory, int minibatch_size, std::mt19937_64& rng) {
    return train_on_pairs(build_pairs(memory, rng), minibatch_size, rng);
}

SiamesePrediction siamese_predict(const SimilarityTable& table) {
    SiamesePrediction out;
    out.mean_similarity.resize(table.size());
    std::optional<int> best;
    for (std::size_t c = 0; c < table.size(); ++c) {
        const auto& sims = table[c];
        if (sims.empty()) {
            continue;
        }
        const double mean =
            std::accumulate(sims.begin(), sims.end(), 0.0) / static_cast<double>(sims.size());
        out.mean_similarity[c] = mean;
        if (!best || mean > *out.mean_similarity[static_cast<std::size_t>(*best)]) {
            best = static_cast<int>(c);
        }
    }
    if (!best) {
        throw NoPredictionError("every class queue is empty");
    }
    out.label = *best;
    return out;
}

SiamesePrediction siamese_predict(const SiameseModel& model, const MultiQueue& memory,
                                  const Vector& x) {
    return siamese_predict(model.similarities(memory, x));
}

double siamese_criterion(const SimilarityTable& table, int predicted) {
    if (predicted < 0 || predicted >= static_cast<int>(table.size()) ||
        table[static_cast<std::size_t>(predicted)].empty()) {
        throw PreconditionError("criterion needs a non-empty predicted-class queue");
    }
    const auto& sims = table[static_cast<std::size_t>(predicted)];
    return *std::max_element(sims.begin(), sims.end());
}

double siamese_criterion(const SiameseModel& model, const MultiQueue& memory, const Vector& x,
                         int predicted) {
    return siamese_criterion(model.similarities(memory, x), predicted);
}

// ---------------------------------------------------------------------------
// Standard

namespace {

nn::NetworkSpec as_softmax(nn::NetworkSpec spec) {
    spec.output = nn::OutputKind::softmax;
    return spec;
}

} // namespace

StandardModel::StandardModel(nn::NetworkSpec spec) : net_(as_softmax(spec)) {}

StandardPrediction StandardModel::predict(const Vector& x) const {
    StandardPrediction out;
    out.probabilities = net_.predict(x.transpose()).row(0).transpose();
    out.label = argmax_first(out.probabilities);
    out.confidence = out.probabilities(out.label);
    return out;
}

double StandardModel::train_on_memory(const MultiQueue& memory, int minibatch_size,
                                      std::mt19937_64& rng) {
    if (memory.empty()) {
        throw PreconditionError("cannot train on an empty memory");
    }
    const auto items = memory.snapshot();
    const auto n = static_cast<Eigen::Index>(items.size());
    Matrix inputs(n, memory.dim());
    Matrix targets = Matrix::Zero(n, num_classes());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& item = items[static_cast<std::size_t>(i)];
        inputs.row(i) = item.x.transpose();
        targets(i, item.label) = 1.0;
    }
    return net_.train_epoch(inputs, targets, nn::LossKind::categorical_cross_entropy,
                            minibatch_size, rng);
}

double StandardModel::train_one(const Vector& x, int label) {
    if (label < 0 || label >= num_classes()) {
        throw InputError("label outside the classifier's class range");
    }
    Matrix target = Matrix::Zero(1, num_classes());
    target(0, label) = 1.0;
    const nn::Activations acts = net_.forward(x.transpose());
    const double cost = nn::loss(nn::LossKind::categorical_cross_entropy, acts.output, target);
    net_.adam_step(net_.backward(acts, target, nn::LossKind::categorical_cross_entropy));
    return cost;
}

double cosine_similarity(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine: vectors differ in dimension");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double input_space_criterion(const MultiQueue& memory, const Vector& x, int predicted) {
    const auto& q = memory.queue(predicted);
    if (q.empty()) {
        throw PreconditionError("criterion needs a non-empty predicted-class queue");
    }
    double best = -1.0;
    for (const auto& stored : q) {
        best = std::max(best, cosine_similarity(x, stored));
    }
    return 0.5 * (best + 1.0);
}

} // namespace actisiamese
