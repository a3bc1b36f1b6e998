#include <doctest.h>

#include <deque>
#include <random>

#include "actisiamese/memory.hpp"

using namespace actisiamese;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

} // namespace

TEST_CASE("initialization from seed data") {
    std::vector<LabeledInstance> d;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 10; ++i) {
            d.push_back({v1(c * 100 + i), c});
        }
    }
    const MultiQueue q(3, 10, d);
    CHECK(q.size() == 30);
    for (int c = 0; c < 3; ++c) {
        CHECK(q.queue(c).size() == 10);
        CHECK(q.queue(c).front()(0) == c * 100);
    }
    const auto snap = q.snapshot();
    REQUIRE(snap.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(snap[i].label == d[i].label);
        CHECK(snap[i].x == d[i].x);
    }

    const MultiQueue minimal(2, 1, std::vector<LabeledInstance>{{v1(1), 0}, {v1(2), 1}});
    CHECK(minimal.queue(0).front()(0) == 1);
    CHECK(minimal.queue(1).front()(0) == 2);

    d.pop_back();
    CHECK_THROWS_AS(MultiQueue(3, 10, d), ConfigError);

    const MultiQueue empty(4, 5);
    CHECK(empty.empty());
    CHECK(empty.snapshot().empty());
}

TEST_CASE("FIFO eviction and isolation") {
    MultiQueue q(10, 2);
    q.append(v1(1), 3);  // a
    q.append(v1(3), 3);  // c
    CHECK(q.queue(3).size() == 2);
    CHECK(q.queue(3)[0](0) == 1);
    CHECK(q.queue(3)[1](0) == 3);

    MultiQueue full(10, 2);
    full.append(v1(1), 0);
    full.append(v1(2), 0);
    full.append(v1(3), 0);
    CHECK(full.queue(0)[0](0) == 2);
    CHECK(full.queue(0)[1](0) == 3);

    MultiQueue iso(10, 3);
    iso.append(v1(7), 4);
    for (int c = 0; c < 10; ++c) {
        CHECK(iso.queue(c).size() == (c == 4 ? 1u : 0u));
    }
    CHECK(iso.snapshot().size() == 1);

    CHECK_THROWS_AS(iso.append(v1(1), 10), InputError);
    CHECK_THROWS_AS(iso.append(v1(1), -1), InputError);
    CHECK_THROWS_AS(iso.append(Vector::Zero(2), 0), InputError);
}

TEST_CASE("queues hold the most recent examples of each class") {
    std::mt19937_64 rng(17);
    const int k = 4;
    const int cap = 3;
    MultiQueue q(k, cap);
    std::vector<std::deque<double>> reference(k);
    for (int step = 0; step < 500; ++step) {
        const int label = static_cast<int>(rng() % k);
        const double value = static_cast<double>(step);
        const auto before = q.version();
        q.append(v1(value), label);
        CHECK(q.version() > before);
        reference[label].push_back(value);
        if (static_cast<int>(reference[label].size()) > cap) {
            reference[label].pop_front();
        }
        REQUIRE(q.size() <= static_cast<std::size_t>(k * cap));
    }
    for (int c = 0; c < k; ++c) {
        REQUIRE(q.queue(c).size() == reference[c].size());
        for (std::size_t i = 0; i < reference[c].size(); ++i) {
            CHECK(q.queue(c)[i](0) == reference[c][i]);
        }
    }
}
