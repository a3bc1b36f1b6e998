#ifndef ACTISIAMESE_MEMORY_HPP
#define ACTISIAMESE_MEMORY_HPP

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "actisiamese/common.hpp"

namespace actisiamese {

/**
 * K bounded FIFO queues of feature vectors, one per class.
 *
 * Within a queue, a larger index means a more recently observed example.
 * Appending to a full queue evicts its oldest element. The class of a stored
 * vector is the index of the queue holding it.
 */
class MultiQueue {
public:
    MultiQueue(int num_classes, int capacity);

    /// Fills the queues from `seed_data`, which must hold exactly `capacity` examples per class.
    MultiQueue(int num_classes, int capacity, std::span<const LabeledInstance> seed_data);

    void append(const Vector& x, int label);

    int num_classes() const { return static_cast<int>(queues_.size()); }
    int capacity() const { return capacity_; }
    const std::deque<Vector>& queue(int label) const;

    /// Total number of stored vectors across all classes.
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// Feature dimension, or 0 before anything has been stored.
    int dim() const { return dim_; }

    /// Stored examples, class by class, oldest first within each class.
    std::vector<LabeledInstance> snapshot() const;

    /// Incremented on every append; lets callers cache derived data.
    std::uint64_t version() const { return version_; }

private:
    void check_label(int label) const;

    int capacity_;
    int dim_ = 0;
    std::uint64_t version_ = 0;
    std::vector<std::deque<Vector>> queues_;
};

} // namespace actisiamese

#endif // ACTISIAMESE_MEMORY_HPP
