#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ltddm/errors.hpp"

namespace ltddm {

/// Discrete time step index. Time is 0-indexed throughout.
using Step = std::int64_t;

/// Total step count of an experiment.
struct Horizon {
    Step steps = 1;
};

/// A maximal contiguous ON run. `end` is the last ON step, inclusive.
struct EventBlock {
    Step start = 0;
    Step end = 0;

    friend bool operator==(const EventBlock&, const EventBlock&) = default;
};

/// Immutable binary state sequence over discrete time steps. Used both for
/// targets and for model predictions.
class EventStream {
public:
    explicit EventStream(std::vector<std::uint8_t> states) : states_(std::move(states)) {
        if (states_.empty()) {
            throw DimensionMismatch("EventStream requires at least one step");
        }
        for (std::size_t i = 0; i < states_.size(); ++i) {
            if (states_[i] > 1) {
                throw DimensionMismatch("EventStream state at step " + std::to_string(i) +
                                        " is not 0/1");
            }
        }
    }

    static EventStream zeros(Step steps) {
        return EventStream(std::vector<std::uint8_t>(static_cast<std::size_t>(steps), 0));
    }

    /// Reconstruct a stream from disjoint, ordered blocks over `horizon` steps.
    static EventStream from_blocks(const std::vector<EventBlock>& blocks, Step horizon) {
        std::vector<std::uint8_t> states(static_cast<std::size_t>(horizon), 0);
        for (const auto& b : blocks) {
            if (b.start < 0 || b.end < b.start || b.end >= horizon) {
                throw DimensionMismatch("block outside horizon");
            }
            for (Step t = b.start; t <= b.end; ++t) {
                states[static_cast<std::size_t>(t)] = 1;
            }
        }
        return EventStream(std::move(states));
    }

    Step size() const { return static_cast<Step>(states_.size()); }

    bool on(Step t) const { return states_[static_cast<std::size_t>(t)] != 0; }

    std::span<const std::uint8_t> states() const { return states_; }

    Horizon horizon() const { return Horizon{size()}; }

    friend bool operator==(const EventStream&, const EventStream&) = default;

private:
    std::vector<std::uint8_t> states_;
};

/// Steps t where the stream turns ON (state 1 preceded by 0 or the start).
inline std::vector<Step> onsets(const EventStream& s) {
    std::vector<Step> out;
    for (Step t = 0; t < s.size(); ++t) {
        if (s.on(t) && (t == 0 || !s.on(t - 1))) {
            out.push_back(t);
        }
    }
    return out;
}

/// Maximal contiguous ON runs, in order.
inline std::vector<EventBlock> blocks(const EventStream& s) {
    std::vector<EventBlock> out;
    Step t = 0;
    const Step n = s.size();
    while (t < n) {
        if (s.on(t)) {
            Step start = t;
            while (t + 1 < n && s.on(t + 1)) {
                ++t;
            }
            out.push_back(EventBlock{start, t});
        }
        ++t;
    }
    return out;
}

/// Every step with state 1, ascending. This is the event set used by the
/// timing-error metric: each ON step counts as an event.
inline std::vector<Step> event_steps(const EventStream& s) {
    std::vector<Step> out;
    for (Step t = 0; t < s.size(); ++t) {
        if (s.on(t)) {
            out.push_back(t);
        }
    }
    return out;
}

}  // namespace ltddm
