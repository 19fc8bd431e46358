#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "ltddm/metrics.hpp"
#include "ltddm/ste.hpp"
#include "test_util.hpp"

using namespace ltddm;
using Catch::Approx;

namespace {

EventStream from_events(const std::vector<Step>& events, Step horizon) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(horizon), 0);
    for (Step e : events) v[static_cast<std::size_t>(e)] = 1;
    return EventStream(std::move(v));
}

}  // namespace

TEST_CASE("nearest_event_distance picks the closest event") {
    const std::vector<Step> two{1, 5};
    CHECK(nearest_event_distance(3, two, Horizon{10}) == 2);  // tie goes to the earlier event
    const std::vector<Step> one{4};
    CHECK(nearest_event_distance(4, one, Horizon{10}) == 0);
    CHECK(nearest_event_distance(3, {}, Horizon{10}) == 10);
}

TEST_CASE("ste_full on small examples") {
    CHECK(ste_full(from_events({2}, 8), from_events({4}, 8)).total == Approx(4.0));

    const auto same = from_events({1, 5}, 8);
    CHECK(ste_full(same, same).total == 0.0);

    CHECK(ste_full(from_events({3, 9}, 12), from_events({4}, 12)).total == Approx(13.5));

    CHECK_THROWS_AS(ste_full(EventStream::zeros(4), EventStream::zeros(5)), HorizonMismatch);
}

TEST_CASE("ste_event is the one-sided term") {
    CHECK(ste_event(6, from_events({4, 9}, 12), Horizon{12}) == Approx(2.0));
    CHECK(ste_event(5, from_events({5}, 12), Horizon{12}) == 0.0);
    CHECK(ste_event(2, EventStream::zeros(8), Horizon{8}) == Approx(32.0));
}

TEST_CASE("grad_eps is the fire-time derivative") {
    CHECK(grad_eps(10, 12) == Approx(2.0));
    CHECK(grad_eps(7, 7) == 0.0);
    CHECK(grad_eps(9, 4) == Approx(-5.0));
}

TEST_CASE("ste_full matches the brute-force oracle") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const Step T = 1 + static_cast<Step>(rng() % 32);
        const auto a = ltddm::testing::random_stream(rng, T);
        const auto b = ltddm::testing::random_stream(rng, T);
        const double expected = ltddm::testing::brute_force_ste(a, b);
        CHECK(ste_full(a, b).total == Approx(expected));
        CHECK(ste_full(a, b).total == Approx(ste_full(b, a).total));  // symmetry
        CHECK(ste_full(a, a).total == 0.0);
    }
}

TEST_CASE("per-event terms sum to twice the total") {
    std::mt19937 rng(7);
    const auto a = ltddm::testing::random_stream(rng, 24);
    const auto b = ltddm::testing::random_stream(rng, 24);
    const auto report = ste_full(a, b);
    double sum = 0.0;
    for (const auto& [step, sq] : report.per_event) sum += sq;
    CHECK(report.total == Approx(0.5 * sum));
}

TEST_CASE("shifting a stream right by one costs one per block") {
    std::mt19937 rng(2024);
    int checked = 0;
    while (checked < 100) {
        const Step T = 12 + static_cast<Step>(rng() % 24);
        const auto y = ltddm::testing::random_stream(rng, T, 0.25);
        const auto bl = blocks(y);
        if (bl.empty()) continue;
        bool interior = true;
        for (const auto& b : bl) {
            if (b.start < 1 || b.end > T - 2) interior = false;
        }
        if (!interior) continue;
        const auto shifted = reactive_baseline(y);
        CHECK(ste_full(y, shifted).total == Approx(static_cast<double>(bl.size())));
        ++checked;
    }
}

TEST_CASE("onset-only mode scores block starts alone") {
    const auto y = EventStream({0, 1, 1, 1, 0, 0});
    const auto p = EventStream({0, 0, 1, 1, 1, 0});
    // Onsets: 1 vs 2 -> half a squared step each way.
    CHECK(ste_full(y, p, EventMode::OnsetsOnly).total == Approx(1.0));
}
