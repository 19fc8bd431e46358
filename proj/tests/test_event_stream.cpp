#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ltddm/event_stream.hpp"
#include "test_util.hpp"

using namespace ltddm;

namespace {

EventStream stream_of(std::initializer_list<int> bits) {
    std::vector<std::uint8_t> v;
    for (int b : bits) v.push_back(static_cast<std::uint8_t>(b));
    return EventStream(std::move(v));
}

}  // namespace

TEST_CASE("onsets finds block starts") {
    CHECK(onsets(stream_of({0, 0, 1, 1, 0, 1})) == std::vector<Step>{2, 5});
    CHECK(onsets(stream_of({0, 0, 0, 0})).empty());
    CHECK(onsets(stream_of({1, 1, 1, 1})) == std::vector<Step>{0});
}

TEST_CASE("blocks finds maximal ON runs") {
    CHECK(blocks(stream_of({0, 1, 1, 0, 1})) ==
          std::vector<EventBlock>{{1, 2}, {4, 4}});
    CHECK(blocks(stream_of({0, 0, 0})).empty());
    CHECK(blocks(stream_of({1, 1, 1})) == std::vector<EventBlock>{{0, 2}});
}

TEST_CASE("event_steps lists every ON step") {
    CHECK(event_steps(stream_of({0, 1, 1, 0})) == std::vector<Step>{1, 2});
    CHECK(event_steps(stream_of({0, 0})).empty());
    CHECK(event_steps(stream_of({1, 0, 1})) == std::vector<Step>{0, 2});
}

TEST_CASE("stream construction rejects bad input") {
    CHECK_THROWS_AS(EventStream({}), DimensionMismatch);
    CHECK_THROWS_AS(EventStream({0, 2, 0}), DimensionMismatch);
}

TEST_CASE("stream properties on random data") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = ltddm::testing::random_stream(rng, 1 + rng() % 64);
        const auto on = onsets(s);
        const auto ev = event_steps(s);
        const auto bl = blocks(s);

        // onsets are a subset of event steps and one per block
        for (Step t : on) {
            CHECK(std::find(ev.begin(), ev.end(), t) != ev.end());
        }
        CHECK(on.size() == bl.size());

        // blocks round-trip to the identical stream
        CHECK(EventStream::from_blocks(bl, s.size()) == s);
    }
}

TEST_CASE("event_steps of constant streams") {
    const auto zero = EventStream::zeros(5);
    CHECK(event_steps(zero).empty());
    const auto ones = stream_of({1, 1, 1, 1});
    CHECK(event_steps(ones) == std::vector<Step>{0, 1, 2, 3});
}
