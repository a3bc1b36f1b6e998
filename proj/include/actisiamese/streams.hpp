#ifndef ACTISIAMESE_STREAMS_HPP
#define ACTISIAMESE_STREAMS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "actisiamese/common.hpp"

namespace actisiamese {

enum class ConceptKind { sea, circles, blobs };

/**
 * A static labelling of the feature box [low, high]^dim.
 *
 * sea:     class c covers boundaries[c] <= sum(x) < boundaries[c+1].
 * circles: class c is the disk of radius spreads[c] around centers[c].
 * blobs:   class c is an isotropic Gaussian with sd spreads[c] around centers[c].
 */
struct Concept {
    ConceptKind kind = ConceptKind::sea;
    int dim = 2;
    double low = 0.0;
    double high = 15.0;
    std::vector<double> boundaries;
    std::vector<Vector> centers;
    std::vector<double> spreads;

    int num_classes() const;
    void validate() const;
};

Concept sea_concept(bool drifted = false);
Concept circles_concept(bool drifted = false);
Concept blobs_concept(bool drifted = false);
Concept make_concept(ConceptKind kind, bool drifted);

/// Bin of x1 + ... + xd among the sea boundaries; empty if the sum is outside [first, last).
std::optional<int> class_of_sea(std::span<const double> boundaries, const Vector& x);

/// Uniform draw from the region of `label` (normal draw for blobs).
Vector sample_from_class(const Concept& cpt, int label, std::mt19937_64& rng);

/// Draws y from `prior`, then x from the region of y.
LabeledInstance sample_instance(const Concept& cpt, std::span<const double> prior,
                                std::mt19937_64& rng);

enum class DriftKind { none, abrupt, recurrent, prior };

struct DriftSchedule {
    DriftKind kind = DriftKind::none;
    long change_step = 5000;  // first step of the changed regime
    long period = 5000;       // recurrent only: steps between flips
};

/// One majority class; every other class has probability `minority_probability`.
struct ImbalanceSpec {
    int majority = 0;
    double minority_probability = 0.01;

    std::vector<double> prior(int num_classes) const;
};

struct StreamSpec {
    ConceptKind dataset = ConceptKind::sea;
    DriftSchedule drift;
    std::optional<ImbalanceSpec> imbalance;  // empty = balanced
    long length = 20000;
    int initial_per_class = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Step-by-step generator. Time starts at t = 1; the initial set precedes it.
class SyntheticStream {
public:
    explicit SyntheticStream(const StreamSpec& spec);

    const std::vector<LabeledInstance>& initial_set() const { return initial_; }
    LabeledInstance next();
    long step() const { return step_; }

    /// Whether the posterior concept is in its changed form at step t.
    bool drifted_at(long t) const;
    const Concept& concept_at(long t) const;
    std::vector<double> prior_at(long t) const;

    int num_classes() const { return original_.num_classes(); }
    int dim() const { return original_.dim; }

private:
    StreamSpec spec_;
    Concept original_;
    Concept drifted_;
    std::vector<double> balanced_prior_;
    std::vector<double> imbalanced_prior_;
    std::vector<LabeledInstance> initial_;
    std::mt19937_64 rng_;
    long step_ = 0;
};

/// A fully materialized stream: the initial labelled set plus the ordered instances.
struct StreamData {
    int num_classes = 0;
    int dim = 0;
    std::vector<LabeledInstance> initial;
    std::vector<LabeledInstance> instances;
};

StreamData generate_stream(const StreamSpec& spec);

enum class Normalization { none, minmax, zscore };

struct CsvOptions {
    bool header = false;
    Normalization normalize = Normalization::none;
    int initial_per_class = 10;
    long max_instances = 0;  // 0 = no limit
};

/**
 * Reads comma-separated rows of numeric features with the label in the last
 * column. Labels are remapped to [0, K) in sorted order (numeric if every label
 * parses as a number). Rows keep file order; the first `initial_per_class`
 * rows of each class become the initial set. Normalization statistics come
 * from the initial set only.
 */
StreamData load_csv_stream(const std::string& path, const CsvOptions& options);
StreamData parse_csv_stream(std::istream& in, const CsvOptions& options);

} // namespace actisiamese

#endif // ACTISIAMESE_STREAMS_HPP
