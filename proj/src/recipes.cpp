#include "actisiamese/recipes.hpp"

#include <algorithm>

namespace actisiamese {

namespace {

constexpr const char* kDatasets[] = {"sea", "circles", "blobs"};
constexpr const char* kScenarios[] = {"stationary",       "imbalance-severe", "imbalance-extreme",
                                      "abrupt",           "imbalance-abrupt", "recurrent",
                                      "prior"};

// Shared defaults: T = 20000, 20 seeds, all methods, L = 10, B = 1%.
RunConfig base(const std::string& dataset) {
    RunConfig c;
    c.set("dataset", dataset);
    return c;
}

} // namespace

std::vector<std::string> recipe_names() {
    std::vector<std::string> out;
    for (const char* d : kDatasets) {
        for (const char* s : kScenarios) {
            // blobs has posterior drift only
            if (std::string(d) == "blobs" && std::string(s) == "prior") {
                continue;
            }
            out.push_back(std::string(d) + "-" + s);
        }
    }
    return out;
}

std::optional<RunConfig> recipe_config(const std::string& name) {
    const auto names = recipe_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        return std::nullopt;
    }
    const auto dash = name.find('-');
    const std::string dataset = name.substr(0, dash);
    const std::string scenario = name.substr(dash + 1);

    RunConfig c = base(dataset);
    if (scenario == "imbalance-severe") {
        c.set("imbalance.p_min", "0.01");
    } else if (scenario == "imbalance-extreme") {
        c.set("imbalance.p_min", "0.001");
    } else if (scenario == "abrupt") {
        c.set("drift.kind", "abrupt");
        c.set("drift.t", "5000");
    } else if (scenario == "imbalance-abrupt") {
        c.set("imbalance.p_min", "0.001");
        c.set("drift.kind", "abrupt");
        c.set("drift.t", "5000");
    } else if (scenario == "recurrent") {
        c.set("drift.kind", "recurrent");
        c.set("drift.t", "5000");
        c.set("drift.period", "5000");
        if (dataset != "circles") {
            c.set("al.budget", "0.05");
        }
    } else if (scenario == "prior") {
        c.set("drift.kind", "prior");
        c.set("drift.t", "5000");
        c.set("imbalance.p_min", "0.01");
    }
    return c;
}

} // namespace actisiamese
