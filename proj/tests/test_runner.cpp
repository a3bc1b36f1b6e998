#include <doctest.h>

#include <algorithm>
#include <string>

#include "actisiamese/runner.hpp"
#include "oracles.hpp"

using namespace actisiamese;

namespace {

StreamData sea_stream(long length, std::uint64_t seed, int per_class = 10) {
    StreamSpec spec;
    spec.dataset = ConceptKind::sea;
    spec.length = length;
    spec.initial_per_class = per_class;
    spec.seed = seed;
    return generate_stream(spec);
}

MethodConfig method(MethodKind kind, bool ensemble = false) {
    MethodConfig c;
    c.method = {kind, ensemble};
    c.seed = 5;
    return c;
}

bool same_rows(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].t != b[i].t || a[i].gmean != b[i].gmean || a[i].accuracy != b[i].accuracy ||
            a[i].labels_spent != b[i].labels_spent || a[i].b_hat != b[i].b_hat ||
            a[i].theta != b[i].theta) {
            return false;
        }
    }
    return true;
}

// Wraps a learner and logs the call order.
class Spy : public Learner {
public:
    explicit Spy(std::unique_ptr<Learner> inner, long fail_at = 0)
        : inner_(std::move(inner)), fail_at_(fail_at) {}
    Prediction predict(const Vector& x) override {
        ++step;
        if (step == fail_at_) {
            throw NumericError("injected");
        }
        log += 'p';
        last_x = x;
        Prediction p = inner_->predict(x);
        predictions.push_back(p.label);
        return p;
    }
    void learn(const Vector& x, int label) override {
        log += 'l';
        CHECK(x == last_x);
        inner_->learn(x, label);
        ++training_calls_;
    }
    void reveal(int label) override {
        log += 'r';
        truths.push_back(label);
    }
    std::string log;
    long step = 0;
    Vector last_x;
    std::vector<std::optional<int>> predictions;
    std::vector<int> truths;

private:
    std::unique_ptr<Learner> inner_;
    long fail_at_;
};

} // namespace

TEST_CASE("method names round-trip") {
    const auto all = all_methods();
    CHECK(all.size() == 8);
    for (const Method& m : all) {
        CHECK(Method::parse(m.name()) == m);
    }
    CHECK(Method::parse("actisiamese-wm").ensemble);
    CHECK_THROWS_AS(Method::parse("svm"), ConfigError);
}

TEST_CASE("method configuration checks") {
    MethodConfig c = method(MethodKind::actiq);
    c.capacity = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.method.kind = MethodKind::rvus;
    CHECK_NOTHROW(c.validate());  // RVUS has no memory
    c = method(MethodKind::actisiamese);
    c.budget = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = method(MethodKind::actisiamese);
    c.capacity = 5;  // initial set holds 10 per class
    CHECK_THROWS_AS(run(c, sea_stream(10, 1)), RunError);
}

TEST_CASE("zero budget never queries or trains") {
    const StreamData s = sea_stream(400, 2);
    MethodConfig c = method(MethodKind::actisiamese);
    c.budget = 0.0;
    auto learner = make_learner(c, s);
    const auto rows = run(*learner, c, s);
    REQUIRE(rows.size() == 400);
    CHECK(rows.back().labels_spent == 0);
    CHECK(learner->training_calls() == 0);
    CHECK(rows.back().b_hat == 0.0);
}

TEST_CASE("full budget with a fixed unit threshold queries every step") {
    const StreamData s = sea_stream(300, 3);
    for (MethodKind kind : {MethodKind::actisiamese, MethodKind::rvus}) {
        MethodConfig c = method(kind);
        c.budget = 1.0;
        c.strategy = {StrategyMode::fixed, 1.0, 0.01, 0.0};
        const auto rows = run(c, s);
        double previous = 0.0;
        for (const auto& r : rows) {
            if (previous < 1.0) {
                REQUIRE(r.labels_spent == r.t);
            }
            previous = r.b_hat;
        }
    }
}

TEST_CASE("runs are deterministic") {
    const StreamData s = sea_stream(600, 4);
    for (MethodKind kind :
         {MethodKind::rvus, MethodKind::actiq, MethodKind::rvss, MethodKind::actisiamese}) {
        MethodConfig c = method(kind);
        c.budget = 0.05;
        CHECK(same_rows(run(c, s), run(c, s)));
    }
    MethodConfig wm = method(MethodKind::actisiamese, true);
    wm.ensemble_size = 3;
    wm.budget = 0.05;
    CHECK(same_rows(run(wm, s), run(wm, s)));
}

TEST_CASE("evaluation uses the prediction made before training") {
    const StreamData s = sea_stream(800, 6);
    MethodConfig c = method(MethodKind::actisiamese);
    c.budget = 0.2;
    c.fading = 1.0;
    Spy spy(make_learner(c, s));
    const auto rows = run(spy, c, s);
    // Each step starts with a prediction and never trains before it.
    std::size_t pos = 0;
    long steps = 0;
    while (pos < spy.log.size()) {
        REQUIRE(spy.log[pos] == 'p');
        ++pos;
        while (pos < spy.log.size() && spy.log[pos] != 'p') {
            ++pos;
        }
        ++steps;
    }
    CHECK(steps == 800);
    CHECK(spy.training_calls() == rows.back().labels_spent);
    CHECK(spy.training_calls() > 0);
    // Tracker G-mean equals the confusion-matrix G-mean of the pre-training predictions.
    std::vector<int> truth;
    for (const auto& item : s.instances) {
        truth.push_back(item.label);
    }
    CHECK(spy.truths == truth);
    CHECK(std::abs(rows.back().gmean - oracle::confusion_gmean(truth, spy.predictions, 10)) < 1e-12);
}

TEST_CASE("mid-run failures report the step") {
    const StreamData s = sea_stream(50, 7);
    MethodConfig c = method(MethodKind::rvus);
    Spy spy(make_learner(c, s), 17);
    try {
        run(spy, c, s);
        FAIL("expected a run error");
    } catch (const RunError& e) {
        CHECK(e.step() == 17);
        CHECK(std::string(e.what()).find("step 17") != std::string::npos);
    }
}

TEST_CASE("one-member ensembles of standard learners match the bare learner") {
    const StreamData s = sea_stream(700, 8);
    for (MethodKind kind : {MethodKind::rvus, MethodKind::actiq, MethodKind::rvss}) {
        MethodConfig single = method(kind);
        single.budget = 0.1;
        MethodConfig wm = single;
        wm.method.ensemble = true;
        wm.ensemble_size = 1;
        CHECK(same_rows(run(single, s), run(wm, s)));
    }
}

TEST_CASE("labels spent respect the budget window after the run-in") {
    const StreamData s = sea_stream(3000, 9);
    MethodConfig c = method(MethodKind::actisiamese);
    c.budget = 0.05;
    const auto rows = run(c, s);
    std::vector<bool> queried;
    long previous = 0;
    for (const auto& r : rows) {
        queried.push_back(r.labels_spent > previous);
        previous = r.labels_spent;
    }
    const auto exact = oracle::sliding_window_spend(queried, c.window);
    for (std::size_t t = 2 * static_cast<std::size_t>(c.window); t < rows.size(); ++t) {
        REQUIRE(exact[t] <= c.budget + 0.02);
        REQUIRE(std::abs(rows[t].b_hat - exact[t]) <= 0.02);
    }
    CHECK(rows.back().labels_spent <= static_cast<long>((c.budget + 0.02) * 3000));
}

TEST_CASE("grid execution") {
    const std::vector<GridArm> arms{{"rvus", method(MethodKind::rvus)},
                                    {"actiq", method(MethodKind::actiq)}};
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    const StreamFactory factory = [](std::uint64_t seed) { return sea_stream(300, seed); };
    const GridResult serial = run_grid(arms, seeds, factory, 1);
    const GridResult parallel = run_grid(arms, seeds, factory, 3);
    REQUIRE(serial.runs.size() == 6);
    for (std::size_t i = 0; i < serial.runs.size(); ++i) {
        CHECK(serial.runs[i].arm == parallel.runs[i].arm);
        CHECK(serial.runs[i].seed == parallel.runs[i].seed);
        CHECK(same_rows(serial.runs[i].rows, parallel.runs[i].rows));
    }
    for (const auto& [name, curve] : serial.gmean) {
        const auto& other = parallel.gmean.at(name);
        REQUIRE(curve.size() == 300);
        for (std::size_t t = 0; t < curve.size(); ++t) {
            CHECK(curve[t].mean == other[t].mean);
            CHECK(curve[t].std_error == other[t].std_error);
        }
    }

    const GridResult empty = run_grid({}, seeds, factory, 2);
    CHECK(empty.runs.empty());
    CHECK(empty.gmean.empty());

    MethodConfig broken = method(MethodKind::actisiamese);
    broken.capacity = 3;  // disagrees with the initial set
    const std::vector<GridArm> mixed{{"broken", broken}, {"rvus", method(MethodKind::rvus)}};
    const GridResult partial = run_grid(mixed, seeds, factory, 2);
    CHECK(partial.runs[0].error.has_value());
    CHECK_FALSE(partial.runs[3].error.has_value());
    CHECK(partial.gmean.at("broken").empty());
    CHECK(partial.gmean.at("rvus").size() == 300);

    std::vector<std::uint64_t> twenty;
    for (std::uint64_t i = 0; i < 20; ++i) {
        twenty.push_back(100 + i);
    }
    const std::vector<GridArm> one{{"rvus", method(MethodKind::rvus)}};
    const GridResult many = run_grid(one, twenty,
                                     [](std::uint64_t seed) { return sea_stream(100, seed); }, 1);
    REQUIRE(many.gmean.size() == 1);
    CHECK(many.gmean.at("rvus").size() == 100);
    const auto& curve = many.gmean.at("rvus");
    CHECK(std::any_of(curve.begin(), curve.end(),
                      [](const AggregatePoint& p) { return p.std_error > 0.0; }));
}
