#include "actisiamese/streams.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

namespace actisiamese {

namespace {

constexpr int kMaxRejections = 10000;

// Child seed streams of a stream seed.
constexpr std::uint64_t kInitialSetStream = 11;
constexpr std::uint64_t kInstanceStream = 12;

} // namespace

int Concept::num_classes() const {
    if (kind == ConceptKind::sea) {
        return static_cast<int>(boundaries.size()) - 1;
    }
    return static_cast<int>(centers.size());
}

void Concept::validate() const {
    if (dim < 1 || !(high > low)) {
        throw ConfigError("concept feature box is empty");
    }
    if (kind == ConceptKind::sea) {
        if (boundaries.size() < 3) {
            throw ConfigError("sea concept needs at least two classes");
        }
        for (std::size_t i = 1; i < boundaries.size(); ++i) {
            if (!(boundaries[i] > boundaries[i - 1])) {
                throw ConfigError("sea boundaries must be strictly increasing");
            }
        }
        return;
    }
    if (centers.size() < 2 || spreads.size() != centers.size()) {
        throw ConfigError("concept needs at least two classes and one spread per class");
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (centers[c].size() != dim) {
            throw ConfigError("concept center has the wrong dimension");
        }
        if (!(spreads[c] > 0.0)) {
            throw ConfigError("concept spreads must be positive");
        }
        const double margin = kind == ConceptKind::circles ? spreads[c] : 0.0;
        if ((centers[c].array() - margin < low).any() ||
            (centers[c].array() + margin > high).any()) {
            throw ConfigError("concept class region leaves the feature box");
        }
    }
    if (kind == ConceptKind::circles) {
        for (std::size_t a = 0; a < centers.size(); ++a) {
            for (std::size_t b = a + 1; b < centers.size(); ++b) {
                if ((centers[a] - centers[b]).norm() < spreads[a] + spreads[b] - 1e-12) {
                    throw ConfigError("circle classes overlap");
                }
            }
        }
    }
}

Concept sea_concept(bool drifted) {
    Concept c;
    c.kind = ConceptKind::sea;
    c.dim = 2;
    if (!drifted) {
        c.boundaries = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 30};
    } else {
        c.boundaries = {0, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30};
    }
    return c;
}

Concept circles_concept(bool drifted) {
    Concept c;
    c.kind = ConceptKind::circles;
    c.dim = 2;
    // 5 x 2 grid of radius-1.5 disks; the changed concept lifts every disk by 2.5,
    // so each class keeps part of its old region.
    const double lift = drifted ? 2.5 : 0.0;
    for (double y : {4.5, 10.5}) {
        for (double x : {1.5, 4.5, 7.5, 10.5, 13.5}) {
            Vector center(2);
            center << x, y + lift;
            c.centers.push_back(center);
            c.spreads.push_back(1.5);
        }
    }
    return c;
}

Concept blobs_concept(bool drifted) {
    Concept c;
    c.kind = ConceptKind::blobs;
    c.dim = 3;
    std::vector<Vector> lattice;
    for (double z : {3.75, 11.25}) {
        for (double y : {3.75, 11.25}) {
            for (double x : {2.5, 7.5, 12.5}) {
                Vector center(3);
                center << x, y, z;
                lattice.push_back(center);
            }
        }
    }
    const std::size_t n = lattice.size();
    for (std::size_t k = 0; k < n; ++k) {
        // Changed concept: class k takes the center of class k + 1 (a cyclic derangement).
        c.centers.push_back(lattice[drifted ? (k + 1) % n : k]);
        c.spreads.push_back(1.0);
    }
    return c;
}

Concept make_concept(ConceptKind kind, bool drifted) {
    switch (kind) {
    case ConceptKind::sea:
        return sea_concept(drifted);
    case ConceptKind::circles:
        return circles_concept(drifted);
    case ConceptKind::blobs:
        return blobs_concept(drifted);
    }
    throw ConfigError("unknown concept kind");
}

std::optional<int> class_of_sea(std::span<const double> boundaries, const Vector& x) {
    const double sum = x.sum();
    if (boundaries.size() < 2 || sum < boundaries.front() || sum >= boundaries.back()) {
        return std::nullopt;
    }
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), sum);
    return static_cast<int>(it - boundaries.begin()) - 1;
}

Vector sample_from_class(const Concept& cpt, int label, std::mt19937_64& rng) {
    if (label < 0 || label >= cpt.num_classes()) {
        throw InputError("class outside the concept");
    }
    const auto k = static_cast<std::size_t>(label);
    Vector x(cpt.dim);
    switch (cpt.kind) {
    case ConceptKind::sea: {
        const double a = cpt.boundaries[k];
        const double b = cpt.boundaries[k + 1];
        // Per-coordinate bounding box of the band inside the feature box.
        const double others = cpt.dim - 1;
        const double lo = std::max(cpt.low, a - others * cpt.high);
        const double hi = std::min(cpt.high, b - others * cpt.low);
        std::uniform_real_distribution<double> coord(lo, hi);
        for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
            for (int i = 0; i < cpt.dim; ++i) {
                x(i) = coord(rng);
            }
            if (class_of_sea(cpt.boundaries, x) == label) {
                return x;
            }
        }
        throw NumericError("sea sampler exceeded its rejection bound for class " +
                           std::to_string(label));
    }
    case ConceptKind::circles: {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double radius = cpt.spreads[k] * std::sqrt(unit(rng));
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        x(0) = cpt.centers[k](0) + radius * std::cos(angle);
        x(1) = cpt.centers[k](1) + radius * std::sin(angle);
        return x;
    }
    case ConceptKind::blobs: {
        std::normal_distribution<double> noise(0.0, cpt.spreads[k]);
        for (int i = 0; i < cpt.dim; ++i) {
            x(i) = cpt.centers[k](i) + noise(rng);
        }
        return x;
    }
    }
    throw ConfigError("unknown concept kind");
}

LabeledInstance sample_instance(const Concept& cpt, std::span<const double> prior,
                                std::mt19937_64& rng) {
    if (static_cast<int>(prior.size()) != cpt.num_classes()) {
        throw ConfigError("class prior length differs from the number of classes");
    }
    std::discrete_distribution<int> pick(prior.begin(), prior.end());
    const int label = pick(rng);
    return {sample_from_class(cpt, label, rng), label};
}

std::vector<double> ImbalanceSpec::prior(int num_classes) const {
    if (majority < 0 || majority >= num_classes) {
        throw ConfigError("majority class outside the class range");
    }
    const double major = 1.0 - (num_classes - 1) * minority_probability;
    if (!(minority_probability >= 0.0) || !(major > 0.0 && major <= 1.0)) {
        throw ConfigError("minority probability leaves no valid majority probability");
    }
    std::vector<double> out(static_cast<std::size_t>(num_classes), minority_probability);
    out[static_cast<std::size_t>(majority)] = major;
    return out;
}

void StreamSpec::validate() const {
    if (length < 0) {
        throw ConfigError("stream length must be non-negative");
    }
    if (initial_per_class < 0) {
        throw ConfigError("initial set size must be non-negative");
    }
    if (drift.kind != DriftKind::none && drift.change_step < 1) {
        throw ConfigError("drift step must be at least 1");
    }
    if (drift.kind == DriftKind::recurrent && drift.period < 1) {
        throw ConfigError("recurrence period must be at least 1");
    }
    if (drift.kind == DriftKind::prior && !imbalance) {
        throw ConfigError("prior drift needs an imbalance specification to switch to");
    }
    const Concept c = make_concept(dataset, false);
    c.validate();
    make_concept(dataset, true).validate();
    if (imbalance) {
        imbalance->prior(c.num_classes());
    }
}

SyntheticStream::SyntheticStream(const StreamSpec& spec)
    : spec_(spec),
      original_(make_concept(spec.dataset, false)),
      drifted_(make_concept(spec.dataset, true)),
      rng_(mix_seed(spec.seed, kInstanceStream)) {
    spec_.validate();
    const int k = original_.num_classes();
    balanced_prior_.assign(static_cast<std::size_t>(k), 1.0 / k);
    imbalanced_prior_ = spec_.imbalance ? spec_.imbalance->prior(k) : balanced_prior_;

    std::mt19937_64 init_rng(mix_seed(spec.seed, kInitialSetStream));
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < spec_.initial_per_class; ++i) {
            initial_.push_back({sample_from_class(original_, c, init_rng), c});
        }
    }
}

bool SyntheticStream::drifted_at(long t) const {
    const DriftSchedule& d = spec_.drift;
    if (t < d.change_step) {
        return false;
    }
    switch (d.kind) {
    case DriftKind::abrupt:
        return true;
    case DriftKind::recurrent:
        return ((t - d.change_step) / d.period) % 2 == 0;
    case DriftKind::none:
    case DriftKind::prior:
        return false;
    }
    return false;
}

const Concept& SyntheticStream::concept_at(long t) const {
    return drifted_at(t) ? drifted_ : original_;
}

std::vector<double> SyntheticStream::prior_at(long t) const {
    if (spec_.drift.kind == DriftKind::prior) {
        return t < spec_.drift.change_step ? balanced_prior_ : imbalanced_prior_;
    }
    return imbalanced_prior_;
}

LabeledInstance SyntheticStream::next() {
    ++step_;
    const auto prior = prior_at(step_);
    return sample_instance(concept_at(step_), prior, rng_);
}

StreamData generate_stream(const StreamSpec& spec) {
    SyntheticStream stream(spec);
    StreamData out;
    out.num_classes = stream.num_classes();
    out.dim = stream.dim();
    out.initial = stream.initial_set();
    out.instances.reserve(static_cast<std::size_t>(spec.length));
    for (long t = 1; t <= spec.length; ++t) {
        out.instances.push_back(stream.next());
    }
    return out;
}

// --------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

struct RawRow {
    std::vector<double> features;
    std::string label;
};

} // namespace

StreamData parse_csv_stream(std::istream& in, const CsvOptions& options) {
    if (options.initial_per_class < 0) {
        throw ConfigError("initial set size must be non-negative");
    }
    std::vector<RawRow> rows;
    std::string line;
    long line_number = 0;
    std::size_t width = 0;
    bool skip_header = options.header;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        if (skip_header) {
            skip_header = false;
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() < 2) {
            throw ParseError("line " + std::to_string(line_number) +
                             ": need at least one feature and a label");
        }
        if (width == 0) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw ParseError("line " + std::to_string(line_number) + ": expected " +
                             std::to_string(width) + " fields, found " +
                             std::to_string(fields.size()));
        }
        RawRow row;
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            const auto value = parse_number(fields[i]);
            if (!value) {
                throw ParseError("line " + std::to_string(line_number) + ": field " +
                                 std::to_string(i + 1) + " is not a number");
            }
            row.features.push_back(*value);
        }
        if (fields.back().empty()) {
            throw ParseError("line " + std::to_string(line_number) + ": empty label");
        }
        row.label = std::string(fields.back());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("CSV stream contains no data rows");
    }

    // Label symbols -> [0, K).
    std::vector<std::string> symbols;
    for (const auto& r : rows) {
        symbols.push_back(r.label);
    }
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
    const bool numeric = std::all_of(symbols.begin(), symbols.end(),
                                     [](const std::string& s) { return parse_number(s).has_value(); });
    if (numeric) {
        std::stable_sort(symbols.begin(), symbols.end(), [](const auto& a, const auto& b) {
            return *parse_number(a) < *parse_number(b);
        });
    }
    std::map<std::string, int> label_of;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        label_of[symbols[i]] = static_cast<int>(i);
    }

    StreamData out;
    out.num_classes = static_cast<int>(symbols.size());
    out.dim = static_cast<int>(width - 1);
    std::vector<int> taken(symbols.size(), 0);
    for (auto& r : rows) {
        LabeledInstance item{Eigen::Map<const Vector>(r.features.data(), out.dim),
                             label_of.at(r.label)};
        int& count = taken[static_cast<std::size_t>(item.label)];
        if (count < options.initial_per_class) {
            ++count;
            out.initial.push_back(std::move(item));
        } else if (options.max_instances <= 0 ||
                   static_cast<long>(out.instances.size()) < options.max_instances) {
            out.instances.push_back(std::move(item));
        }
    }
    for (std::size_t c = 0; c < taken.size(); ++c) {
        if (taken[c] < options.initial_per_class) {
            throw ConfigError("class '" + symbols[c] + "' has only " + std::to_string(taken[c]) +
                              " rows; the initial set needs " +
                              std::to_string(options.initial_per_class));
        }
    }

    if (options.normalize != Normalization::none && !out.initial.empty()) {
        Matrix seed(static_cast<Eigen::Index>(out.initial.size()), out.dim);
        for (std::size_t i = 0; i < out.initial.size(); ++i) {
            seed.row(static_cast<Eigen::Index>(i)) = out.initial[i].x.transpose();
        }
        Vector shift;
        Vector scale;
        if (options.normalize == Normalization::minmax) {
            shift = seed.colwise().minCoeff().transpose();
            scale = seed.colwise().maxCoeff().transpose() - shift;
        } else {
            shift = seed.colwise().mean().transpose();
            const Matrix centered = seed.rowwise() - shift.transpose();
            scale = (centered.colwise().squaredNorm() / static_cast<double>(seed.rows()))
                        .cwiseSqrt()
                        .transpose();
        }
        scale = scale.unaryExpr([](double s) { return s > 0.0 ? s : 1.0; });
        auto apply = [&](LabeledInstance& item) {
            item.x = (item.x - shift).cwiseQuotient(scale);
        };
        std::for_each(out.initial.begin(), out.initial.end(), apply);
        std::for_each(out.instances.begin(), out.instances.end(), apply);
    }
    return out;
}

StreamData load_csv_stream(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open CSV stream '" + path + "'");
    }
    return parse_csv_stream(in, options);
}

} // namespace actisiamese
