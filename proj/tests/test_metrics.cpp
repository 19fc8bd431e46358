#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ltddm/metrics.hpp"
#include "ltddm/ste.hpp"
#include "test_util.hpp"

using namespace ltddm;
using Catch::Approx;

TEST_CASE("confusion counts per step") {
    const auto c1 = confusion(EventStream({1, 0}), EventStream({1, 0}));
    CHECK(c1.tp == 1);
    CHECK(c1.tn == 1);
    CHECK(c1.fp == 0);
    CHECK(c1.fn == 0);

    const auto c2 = confusion(EventStream({1, 0, 0}), EventStream({0, 1, 0}));
    CHECK(c2.fn == 1);
    CHECK(c2.fp == 1);
    CHECK(c2.tn == 1);

    const auto c3 = confusion(EventStream::zeros(6), EventStream::zeros(6));
    CHECK(c3.tn == 6);

    CHECK_THROWS_AS(confusion(EventStream::zeros(3), EventStream::zeros(4)), HorizonMismatch);
}

TEST_CASE("counts partition the horizon") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Step T = 1 + static_cast<Step>(rng() % 40);
        const auto y = ltddm::testing::random_stream(rng, T);
        const auto p = ltddm::testing::random_stream(rng, T);
        CHECK(confusion(y, p).total() == T);
    }
}

TEST_CASE("classification scores") {
    ConfusionCounts c{1, 1, 0, 0};
    CHECK(precision(c) == Approx(0.5));
    CHECK(recall(c) == Approx(1.0));
    CHECK(f1(c) == Approx(2.0 / 3.0));

    ConfusionCounts silent{0, 0, 2, 5};
    CHECK(precision(silent) == 0.0);  // 0/0 convention
    CHECK(f1(silent) == 0.0);

    ConfusionCounts all_off{0, 0, 0, 9};
    CHECK(accuracy(all_off) == Approx(1.0));
}

TEST_CASE("majority baseline predicts the modal state") {
    std::vector<std::uint8_t> sparse(100, 0);
    for (int i = 0; i < 10; ++i) sparse[static_cast<std::size_t>(i * 10)] = 1;
    const auto [pred_sparse, acc_sparse] = majority_baseline(EventStream(sparse));
    CHECK(event_steps(pred_sparse).empty());
    CHECK(acc_sparse == Approx(0.9));

    std::vector<std::uint8_t> dense(100, 0);
    for (int i = 0; i < 60; ++i) dense[static_cast<std::size_t>(i)] = 1;
    const auto [pred_dense, acc_dense] = majority_baseline(EventStream(dense));
    CHECK(static_cast<std::size_t>(event_steps(pred_dense).size()) == 100);
    CHECK(acc_dense == Approx(0.6));

    std::vector<std::uint8_t> half(10, 0);
    for (int i = 0; i < 5; ++i) half[static_cast<std::size_t>(i)] = 1;
    const auto [pred_half, acc_half] = majority_baseline(EventStream(half));
    CHECK(event_steps(pred_half).empty());  // ties go OFF
    CHECK(acc_half == Approx(0.5));
}

TEST_CASE("majority accuracy equals max(p, 1-p)") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Step T = 1 + static_cast<Step>(rng() % 60);
        const auto y = ltddm::testing::random_stream(rng, T, 0.5);
        std::int64_t ones = 0;
        for (Step t = 0; t < T; ++t) ones += y.on(t) ? 1 : 0;
        const double p = static_cast<double>(ones) / static_cast<double>(T);
        const auto [pred, acc] = majority_baseline(y);
        CHECK(acc == Approx(std::max(p, 1.0 - p)));
        CHECK(acc >= 0.5);
        CHECK(accuracy(confusion(y, pred)) == Approx(acc));
    }
}

TEST_CASE("reactive baseline repeats the previous step") {
    CHECK(reactive_baseline(EventStream({0, 1, 1, 0})) == EventStream({0, 0, 1, 1}));
    CHECK(reactive_baseline(EventStream::zeros(5)) == EventStream::zeros(5));
}

TEST_CASE("reactive baseline costs one squared step per interior block") {
    std::mt19937 rng(23);
    int checked = 0;
    while (checked < 60) {
        const Step T = 10 + static_cast<Step>(rng() % 30);
        const auto y = ltddm::testing::random_stream(rng, T, 0.3);
        const auto bl = blocks(y);
        if (bl.empty()) continue;
        bool interior = true;
        for (const auto& b : bl) {
            if (b.start < 1 || b.end > T - 2) interior = false;
        }
        if (!interior) continue;
        CHECK(ste_full(y, reactive_baseline(y)).total ==
              Approx(static_cast<double>(bl.size())));
        ++checked;
    }
}

TEST_CASE("reactive of reactive shifts by two") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        const Step T = 4 + static_cast<Step>(rng() % 30);
        const auto y = ltddm::testing::random_stream(rng, T);
        const auto twice = reactive_baseline(reactive_baseline(y));
        for (Step t = 0; t < T; ++t) {
            const bool expected = t >= 2 && y.on(t - 2);
            CHECK(twice.on(t) == expected);
        }
    }
}
