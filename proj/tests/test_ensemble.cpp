#include <doctest.h>

#include <cmath>
#include <deque>

#include "actisiamese/ensemble.hpp"

using namespace actisiamese;

namespace {

Vector probs(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++) = x;
    }
    return out;
}

// Member with a scripted output; records what it was trained on.
class ScriptedLearner : public Learner {
public:
    explicit ScriptedLearner(std::optional<int> label, Vector p) : label_(label), p_(std::move(p)) {}
    Prediction predict(const Vector&) override {
        return {label_, p_, label_ ? p_.maxCoeff() : 0.0};
    }
    void learn(const Vector&, int label) override {
        learned.push_back(label);
        ++training_calls_;
    }
    std::vector<int> learned;

private:
    std::optional<int> label_;
    Vector p_;
};

std::unique_ptr<Learner> scripted(std::optional<int> label, Vector p) {
    return std::make_unique<ScriptedLearner>(label, std::move(p));
}

} // namespace

TEST_CASE("weighted average and argmax") {
    WeightedMajority wm(2, 0.5);
    const std::vector<MemberOutput> outs{{0, probs({0.6, 0.4})}, {1, probs({0.2, 0.8})}};
    const EnsembleOutput o = wm.combine(outs);
    CHECK(o.average(0) == doctest::Approx(0.4));
    CHECK(o.average(1) == doctest::Approx(0.6));
    CHECK(o.label == 1);
    CHECK(WeightedMajority::criterion(o.average) == doctest::Approx(0.6));

    wm.set_weights({1.0, 0.0});
    const EnsembleOutput first = wm.combine(outs);
    CHECK(first.label == 0);
    CHECK(first.average == outs[0].probabilities);

    WeightedMajority same(3, 0.5);
    const std::vector<MemberOutput> clones(3, MemberOutput{2, probs({0.1, 0.3, 0.6})});
    CHECK(same.combine(clones).average.isApprox(clones[0].probabilities, 1e-15));

    CHECK(WeightedMajority::criterion(Vector::Constant(4, 0.25)) == 0.25);
    CHECK(WeightedMajority::criterion(probs({0, 1, 0})) == 1.0);
}

TEST_CASE("members without a prediction are excluded") {
    WeightedMajority wm(3, 0.5);
    const std::vector<MemberOutput> outs{
        {std::nullopt, Vector::Zero(2)}, {0, probs({0.7, 0.3})}, {std::nullopt, Vector::Zero(2)}};
    const EnsembleOutput o = wm.combine(outs);
    CHECK(o.label == 0);
    CHECK(o.average(0) == doctest::Approx(0.7));
    const std::vector<MemberOutput> none(3, MemberOutput{std::nullopt, Vector::Zero(2)});
    CHECK_THROWS_AS(wm.combine(none), NoPredictionError);
}

TEST_CASE("multiplicative weight update with renormalization") {
    WeightedMajority wm(2, 0.5);
    const std::vector<int> z{1, 0};
    wm.update(z);
    CHECK(wm.weights()[0] == doctest::Approx(0.3775).epsilon(1e-4 / 0.3775));
    CHECK(wm.weights()[1] == doctest::Approx(0.6225).epsilon(1e-4 / 0.6225));
    const double expected = std::exp(-0.5) / (1.0 + std::exp(-0.5));
    CHECK(std::abs(wm.weights()[0] - expected) < 1e-12);

    double previous = wm.weights()[0];
    for (int i = 0; i < 50; ++i) {
        wm.update(z);
        CHECK(wm.weights()[0] < previous);
        CHECK(wm.weights()[0] > 0.0);
        CHECK(wm.weights()[0] + wm.weights()[1] == doctest::Approx(1.0).epsilon(1e-12));
        previous = wm.weights()[0];
    }

    WeightedMajority stable(3, 0.5);
    stable.set_weights({0.2, 0.3, 0.5});
    const std::vector<int> all_right{0, 0, 0};
    stable.update(all_right);
    CHECK(stable.weights()[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(stable.weights()[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(WeightedMajority(0, 0.5), ConfigError);
}

TEST_CASE("ensemble learner weighting modes") {
    auto build = [](WeightUpdateMode mode) {
        std::vector<std::unique_ptr<Learner>> members;
        members.push_back(scripted(0, probs({0.9, 0.1})));
        members.push_back(scripted(1, probs({0.3, 0.7})));
        return EnsembleLearner(std::move(members), 0.5, mode,
                               EnsembleCriterion::max_average_probability);
    };
    const Vector x = Vector::Zero(2);

    EnsembleLearner queried = build(WeightUpdateMode::queried);
    const Prediction p = queried.predict(x);
    CHECK(p.label == 0);
    CHECK(p.criterion == doctest::Approx(0.6));
    queried.reveal(1);
    CHECK(queried.weighting().weights()[0] == 0.5);
    queried.learn(x, 1);
    CHECK(queried.weighting().weights()[0] == doctest::Approx(0.3775).epsilon(1e-3));
    for (const auto& m : queried.members()) {
        CHECK(dynamic_cast<ScriptedLearner&>(*m).learned == std::vector<int>{1});
    }

    EnsembleLearner every = build(WeightUpdateMode::every_step);
    every.predict(x);
    every.reveal(1);
    CHECK(every.weighting().weights()[0] == doctest::Approx(0.3775).epsilon(1e-3));
    every.learn(x, 1);
    CHECK(every.weighting().weights()[0] == doctest::Approx(0.3775).epsilon(1e-3));

    std::vector<std::unique_ptr<Learner>> mute;
    mute.push_back(scripted(std::nullopt, Vector::Zero(2)));
    EnsembleLearner silent(std::move(mute), 0.5, WeightUpdateMode::queried,
                           EnsembleCriterion::max_average_probability);
    const Prediction none = silent.predict(x);
    CHECK_FALSE(none.label.has_value());
    CHECK(none.criterion == 0.0);

    std::vector<std::unique_ptr<Learner>> one;
    one.push_back(scripted(0, probs({0.9, 0.1})));
    CHECK_THROWS_AS(EnsembleLearner(std::move(one), 0.5, WeightUpdateMode::queried,
                                    EnsembleCriterion::input_similarity),
                    ConfigError);
}

TEST_CASE("single-member siamese ensemble predicts and trains like the bare learner") {
    LearnerConfig c;
    c.num_classes = 2;
    c.dim = 2;
    c.hidden_dims = {8, 4};
    c.capacity = 2;
    c.seed = 11;
    std::vector<LabeledInstance> d;
    for (int i = 0; i < 4; ++i) {
        d.push_back({Vector::Constant(2, i < 2 ? 0.1 * i : 3.0 + 0.1 * i), i < 2 ? 0 : 1});
    }
    ActiSiameseLearner bare(c, d);
    std::vector<std::unique_ptr<Learner>> members;
    members.push_back(std::make_unique<ActiSiameseLearner>(c, d));
    EnsembleLearner wrapped(std::move(members), 0.5, WeightUpdateMode::queried,
                            EnsembleCriterion::max_average_probability);
    for (int t = 0; t < 20; ++t) {
        const Vector x = Vector::Constant(2, 0.2 * t);
        const Prediction a = bare.predict(x);
        const Prediction b = wrapped.predict(x);
        CHECK(a.label == b.label);
        CHECK(a.probabilities.isApprox(b.probabilities, 1e-15));
        const int y = t < 10 ? 0 : 1;
        bare.learn(x, y);
        wrapped.learn(x, y);
    }
    const auto& inner = dynamic_cast<const ActiSiameseLearner&>(*wrapped.members()[0]);
    CHECK(inner.model().head().weights == bare.model().head().weights);
}
