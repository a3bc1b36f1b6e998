#include "actisiamese/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace actisiamese {

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"dataset", "sea", "sea | circles | blobs | csv"},
        {"csv.path", "", "CSV file (dataset = csv); label in the last column"},
        {"csv.header", "false", "whether the CSV has a header row"},
        {"csv.normalize", "none", "none | minmax | zscore (statistics from the initial set)"},
        {"T", "20000", "stream length in steps (CSV: 0 = whole file)"},
        {"seeds", "20", "number of repetitions"},
        {"seed_base", "1", "first run seed; runs use seed_base .. seed_base + seeds - 1"},
        {"output_dir", "", "output directory (empty = $ACTISIAMESE_OUTPUT_DIR or ./results)"},
        {"method.list", "rvus,actiq,rvss,actisiamese,rvus-wm,actiq-wm,rvss-wm,actisiamese-wm",
         "comma-separated methods"},
        {"method.L", "10", "per-class queue capacity of memory-based methods"},
        {"method.seed_memory", "true", "fill memory-based queues with the initial labelled set"},
        {"method.N", "10", "ensemble size of -wm methods"},
        {"method.beta", "0.5", "weighted-majority penalty factor"},
        {"method.wm_update", "queried", "queried | every_step"},
        {"drift.kind", "none", "none | abrupt | recurrent | prior"},
        {"drift.t", "5000", "first step of the changed regime"},
        {"drift.period", "5000", "recurrent drift: steps between concept flips"},
        {"imbalance.p_min", "0", "probability of each minority class (0 = balanced)"},
        {"imbalance.majority", "1", "majority class, 1-based"},
        {"al.budget", "0.01", "labelling budget B in [0, 1]"},
        {"al.mode", "randomised", "randomised | fixed"},
        {"al.theta", "1.0", "initial threshold"},
        {"al.s", "0.01", "threshold step size"},
        {"al.delta", "1.0", "spread of the threshold multiplier (0 = none)"},
        {"al.window", "300", "budget estimation window w"},
        {"nn.hidden", "32,32", "hidden layer widths"},
        {"nn.lr", "0.01", "Adam learning rate"},
        {"nn.batch", "64", "mini-batch size"},
        {"nn.slope", "0.01", "leaky-ReLU negative slope"},
        {"eval.fading", "0.99", "prequential fading factor"},
    };
    return keys;
}

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

bool known_key(const std::string& key) {
    const auto& keys = config_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& k) { return key == k.name; });
}

} // namespace

RunConfig::RunConfig() {
    for (const auto& k : config_keys()) {
        values_[k.name] = k.default_value;
    }
}

RunConfig RunConfig::parse(std::istream& in) {
    RunConfig config;
    std::string line;
    long number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string content = trim(line);
        if (content.empty()) {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (!known_key(key)) {
            throw ParseError("line " + std::to_string(number) + ": unknown key '" + key + "'");
        }
        config.values_[key] = value;
    }
    return config;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot read config file '" + path + "'");
    }
    return parse(in);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    values_[key] = trim(value);
}

const std::string& RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    return it->second;
}

std::string RunConfig::to_text() const {
    std::ostringstream out;
    for (const auto& k : config_keys()) {
        out << k.name << " = " << values_.at(k.name) << '\n';
    }
    return out.str();
}

Experiment RunConfig::resolve() const {
    const auto num = [&](const char* key) { return parse_number<double>(key, get(key)); };
    const auto integer = [&](const char* key) { return parse_number<long>(key, get(key)); };

    Experiment e;
    e.dataset = get("dataset");
    e.output_dir = get("output_dir");

    const long seeds = integer("seeds");
    if (seeds < 0) {
        throw ConfigError("seeds must be non-negative");
    }
    e.seeds = static_cast<int>(seeds);
    e.seed_base = parse_number<std::uint64_t>("seed_base", get("seed_base"));

    for (const auto& name : split_list(get("method.list"))) {
        const Method m = Method::parse(name);
        if (std::find(e.methods.begin(), e.methods.end(), m) != e.methods.end()) {
            throw ConfigError("method '" + name + "' listed twice");
        }
        e.methods.push_back(m);
    }

    MethodConfig& mc = e.method_defaults;
    mc.budget = num("al.budget");
    mc.capacity = static_cast<int>(integer("method.L"));
    mc.seed_memory = parse_bool("method.seed_memory", get("method.seed_memory"));
    mc.ensemble_size = static_cast<int>(integer("method.N"));
    mc.beta = num("method.beta");
    const std::string& update = get("method.wm_update");
    if (update == "queried") {
        mc.weight_update = WeightUpdateMode::queried;
    } else if (update == "every_step") {
        mc.weight_update = WeightUpdateMode::every_step;
    } else {
        throw ConfigError("method.wm_update must be queried or every_step");
    }

    const std::string& mode = get("al.mode");
    if (mode == "randomised") {
        mc.strategy.mode = StrategyMode::randomised_variable;
    } else if (mode == "fixed") {
        mc.strategy.mode = StrategyMode::fixed;
    } else {
        throw ConfigError("al.mode must be randomised or fixed");
    }
    mc.strategy.theta = num("al.theta");
    mc.strategy.step = num("al.s");
    mc.strategy.delta = num("al.delta");
    mc.window = static_cast<int>(integer("al.window"));

    mc.hidden_dims.clear();
    for (const auto& w : split_list(get("nn.hidden"))) {
        mc.hidden_dims.push_back(parse_number<int>("nn.hidden", w));
    }
    mc.learning_rate = num("nn.lr");
    mc.minibatch_size = static_cast<int>(integer("nn.batch"));
    mc.slope = num("nn.slope");
    mc.fading = num("eval.fading");
    mc.validate();

    const long length = integer("T");
    if (length < 0) {
        throw ConfigError("T must be non-negative");
    }

    const std::string& drift = get("drift.kind");
    if (drift.find('+') != std::string::npos) {
        throw ConfigError("drift.kind '" + drift +
                          "': prior and posterior drift cannot be combined in one stream");
    }

    if (e.dataset == "csv") {
        if (get("csv.path").empty()) {
            throw ConfigError("dataset csv requires csv.path");
        }
        if (drift != "none" || num("imbalance.p_min") != 0.0) {
            throw ConfigError("drift and imbalance keys apply to synthetic datasets only");
        }
        e.csv_path = get("csv.path");
        e.csv.header = parse_bool("csv.header", get("csv.header"));
        const std::string& norm = get("csv.normalize");
        if (norm == "none") {
            e.csv.normalize = Normalization::none;
        } else if (norm == "minmax") {
            e.csv.normalize = Normalization::minmax;
        } else if (norm == "zscore") {
            e.csv.normalize = Normalization::zscore;
        } else {
            throw ConfigError("csv.normalize must be none, minmax or zscore");
        }
        e.csv.initial_per_class = mc.capacity;
        e.csv.max_instances = length;
        return e;
    }

    StreamSpec& s = e.stream;
    if (e.dataset == "sea") {
        s.dataset = ConceptKind::sea;
    } else if (e.dataset == "circles") {
        s.dataset = ConceptKind::circles;
    } else if (e.dataset == "blobs") {
        s.dataset = ConceptKind::blobs;
    } else {
        throw ConfigError("dataset must be sea, circles, blobs or csv");
    }
    s.length = length;
    s.initial_per_class = mc.capacity;
    if (drift == "none") {
        s.drift.kind = DriftKind::none;
    } else if (drift == "abrupt") {
        s.drift.kind = DriftKind::abrupt;
    } else if (drift == "recurrent") {
        s.drift.kind = DriftKind::recurrent;
    } else if (drift == "prior") {
        s.drift.kind = DriftKind::prior;
    } else {
        throw ConfigError("drift.kind must be none, abrupt, recurrent or prior");
    }
    s.drift.change_step = integer("drift.t");
    s.drift.period = integer("drift.period");

    const double p_min = num("imbalance.p_min");
    if (p_min != 0.0) {
        ImbalanceSpec imbalance;
        imbalance.minority_probability = p_min;
        imbalance.majority = static_cast<int>(integer("imbalance.majority")) - 1;
        s.imbalance = imbalance;
    }
    s.validate();
    return e;
}

std::vector<std::uint64_t> Experiment::seed_list() const {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < seeds; ++i) {
        out.push_back(seed_base + static_cast<std::uint64_t>(i));
    }
    return out;
}

std::vector<GridArm> Experiment::arms() const {
    std::vector<GridArm> out;
    for (const Method& m : methods) {
        MethodConfig c = method_defaults;
        c.method = m;
        out.push_back({m.name(), c});
    }
    return out;
}

StreamData Experiment::make_stream(std::uint64_t seed) const {
    if (dataset == "csv") {
        return load_csv_stream(csv_path, csv);
    }
    StreamSpec spec = stream;
    spec.seed = seed;
    return generate_stream(spec);
}

} // namespace actisiamese
