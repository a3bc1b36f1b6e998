#include "actisiamese/ensemble.hpp"

#include <cmath>
#include <numeric>

#include "actisiamese/models.hpp"

namespace actisiamese {

WeightedMajority::WeightedMajority(int members, double beta) : beta_(beta) {
    if (members < 1) {
        throw ConfigError("an ensemble needs at least one member");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw ConfigError("weighted-majority beta must be non-negative");
    }
    weights_.assign(static_cast<std::size_t>(members), 1.0 / members);
}

void WeightedMajority::set_weights(std::vector<double> weights) {
    if (weights.size() != weights_.size()) {
        throw ConfigError("weight count differs from member count");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigError("weights must be finite and non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw ConfigError("weights must not all be zero");
    }
    for (double& w : weights) {
        w /= total;
    }
    weights_ = std::move(weights);
}

EnsembleOutput WeightedMajority::combine(std::span<const MemberOutput> outputs) const {
    if (outputs.size() != weights_.size()) {
        throw ShapeError("member output count differs from member count");
    }
    Vector sum;
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (!outputs[i].label) {
            continue;
        }
        if (sum.size() == 0) {
            sum = Vector::Zero(outputs[i].probabilities.size());
        } else if (sum.size() != outputs[i].probabilities.size()) {
            throw ShapeError("members disagree on the number of classes");
        }
        sum += weights_[i] * outputs[i].probabilities;
        weight_sum += weights_[i];
    }
    if (sum.size() == 0) {
        throw NoPredictionError("no ensemble member can predict");
    }
    EnsembleOutput out;
    if (weight_sum > 0.0) {
        out.average = sum / weight_sum;
    } else {
        // Only zero-weight members contributed: fall back to their plain average.
        int count = 0;
        out.average = Vector::Zero(sum.size());
        for (const auto& o : outputs) {
            if (o.label) {
                out.average += o.probabilities;
                ++count;
            }
        }
        out.average /= count;
    }
    out.label = argmax_first(out.average);
    return out;
}

void WeightedMajority::update(std::span<const int> zero_one_losses) {
    if (zero_one_losses.size() != weights_.size()) {
        throw ShapeError("loss count differs from member count");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        weights_[i] *= std::exp(-beta_ * static_cast<double>(zero_one_losses[i]));
        total += weights_[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        // Every weight underflowed together; they were equal-ranked, so reset.
        std::fill(weights_.begin(), weights_.end(), 1.0 / static_cast<double>(weights_.size()));
        return;
    }
    for (double& w : weights_) {
        w /= total;
    }
}

double WeightedMajority::criterion(const Vector& average) { return average.maxCoeff(); }

// --------------------------------------------------------------------------

EnsembleLearner::EnsembleLearner(std::vector<std::unique_ptr<Learner>> members, double beta,
                                 WeightUpdateMode mode, EnsembleCriterion criterion,
                                 std::optional<MultiQueue> mirror)
    : members_(std::move(members)),
      weighting_(static_cast<int>(members_.size()), beta),
      mode_(mode),
      criterion_(criterion),
      mirror_(std::move(mirror)) {
    if (criterion_ == EnsembleCriterion::input_similarity && !mirror_) {
        throw ConfigError("input-similarity ensemble criterion needs a memory mirror");
    }
}

Prediction EnsembleLearner::predict(const Vector& x) {
    last_outputs_.clear();
    last_outputs_.reserve(members_.size());
    int num_classes = 0;
    for (auto& member : members_) {
        Prediction p = member->predict(x);
        num_classes = static_cast<int>(p.probabilities.size());
        last_outputs_.push_back({p.label, std::move(p.probabilities)});
    }

    Prediction out;
    out.probabilities = Vector::Zero(num_classes);
    try {
        EnsembleOutput combined = weighting_.combine(last_outputs_);
        out.label = combined.label;
        out.probabilities = std::move(combined.average);
    } catch (const NoPredictionError&) {
        return out;
    }
    if (criterion_ == EnsembleCriterion::max_average_probability) {
        out.criterion = WeightedMajority::criterion(out.probabilities);
    } else {
        out.criterion = mirror_->queue(*out.label).empty()
                            ? 0.0
                            : input_space_criterion(*mirror_, x, *out.label);
    }
    return out;
}

void EnsembleLearner::update_weights(int label) {
    if (last_outputs_.size() != members_.size()) {
        return;
    }
    std::vector<int> losses(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        losses[i] = (last_outputs_[i].label && *last_outputs_[i].label == label) ? 0 : 1;
    }
    weighting_.update(losses);
}

void EnsembleLearner::learn(const Vector& x, int label) {
    if (mode_ == WeightUpdateMode::queried) {
        update_weights(label);
    }
    if (mirror_) {
        mirror_->append(x, label);
    }
    for (auto& member : members_) {
        member->learn(x, label);
    }
    ++training_calls_;
}

void EnsembleLearner::reveal(int label) {
    if (mode_ == WeightUpdateMode::every_step) {
        update_weights(label);
    }
}

} // namespace actisiamese
