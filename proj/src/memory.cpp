#include "actisiamese/memory.hpp"

#include <numeric>

namespace actisiamese {

MultiQueue::MultiQueue(int num_classes, int capacity) : capacity_(capacity) {
    if (num_classes < 1) {
        throw ConfigError("multi-queue memory needs at least one class");
    }
    if (capacity < 1) {
        throw ConfigError("queue capacity must be at least 1");
    }
    queues_.resize(static_cast<std::size_t>(num_classes));
}

MultiQueue::MultiQueue(int num_classes, int capacity, std::span<const LabeledInstance> seed_data)
    : MultiQueue(num_classes, capacity) {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (const auto& item : seed_data) {
        if (item.label < 0 || item.label >= num_classes) {
            throw ConfigError("initial data contains out-of-range class " +
                              std::to_string(item.label));
        }
        ++counts[static_cast<std::size_t>(item.label)];
    }
    for (int c = 0; c < num_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] != capacity) {
            throw ConfigError("initial data must hold exactly " + std::to_string(capacity) +
                              " examples of class " + std::to_string(c) + ", found " +
                              std::to_string(counts[static_cast<std::size_t>(c)]));
        }
    }
    for (const auto& item : seed_data) {
        append(item.x, item.label);
    }
}

void MultiQueue::check_label(int label) const {
    if (label < 0 || label >= num_classes()) {
        throw InputError("class " + std::to_string(label) + " outside [0, " +
                         std::to_string(num_classes()) + ")");
    }
}

void MultiQueue::append(const Vector& x, int label) {
    check_label(label);
    if (dim_ == 0) {
        if (x.size() == 0) {
            throw InputError("cannot store an empty feature vector");
        }
        dim_ = static_cast<int>(x.size());
    } else if (x.size() != dim_) {
        throw InputError("feature vector has dimension " + std::to_string(x.size()) +
                         ", memory holds dimension " + std::to_string(dim_));
    }
    auto& q = queues_[static_cast<std::size_t>(label)];
    if (static_cast<int>(q.size()) == capacity_) {
        q.pop_front();
    }
    q.push_back(x);
    ++version_;
}

const std::deque<Vector>& MultiQueue::queue(int label) const {
    check_label(label);
    return queues_[static_cast<std::size_t>(label)];
}

std::size_t MultiQueue::size() const {
    return std::accumulate(queues_.begin(), queues_.end(), std::size_t{0},
                           [](std::size_t acc, const auto& q) { return acc + q.size(); });
}

std::vector<LabeledInstance> MultiQueue::snapshot() const {
    std::vector<LabeledInstance> out;
    out.reserve(size());
    for (int c = 0; c < num_classes(); ++c) {
        for (const auto& x : queues_[static_cast<std::size_t>(c)]) {
            out.push_back({x, c});
        }
    }
    return out;
}

} // namespace actisiamese
