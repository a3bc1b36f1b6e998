#ifndef ACTISIAMESE_COMMON_HPP
#define ACTISIAMESE_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace actisiamese {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One stream element. Labels are zero-based class indices in [0, K).
struct LabeledInstance {
    Vector x;
    int label = 0;
};

// Error taxonomy. Everything derives from std::runtime_error so callers that
// only care about "it failed" can catch one type.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough stored examples to form a balanced pair set.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every class queue is empty, so no similarity-based prediction exists.
class NoPredictionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AggregationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// splitmix64 finalizer; used to derive independent child seeds from one master seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace actisiamese

#endif // ACTISIAMESE_COMMON_HPP
