#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "ltddm/event_stream.hpp"

namespace ltddm {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

/// Per-step counts with ON as the positive class.
inline ConfusionCounts confusion(const EventStream& target, const EventStream& prediction) {
    if (target.size() != prediction.size()) {
        throw HorizonMismatch("confusion: streams have different lengths");
    }
    ConfusionCounts c;
    for (Step t = 0; t < target.size(); ++t) {
        const bool y = target.on(t);
        const bool p = prediction.on(t);
        if (y && p) ++c.tp;
        else if (!y && p) ++c.fp;
        else if (y && !p) ++c.fn;
        else ++c.tn;
    }
    return c;
}

// 0/0 is defined as 0 so silent models score zero rather than undefined.
inline double precision(const ConfusionCounts& c) {
    return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

inline double recall(const ConfusionCounts& c) {
    return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

inline double f1(const ConfusionCounts& c) {
    const double p = precision(c);
    const double r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

inline double accuracy(const ConfusionCounts& c) {
    return c.total() == 0 ? 0.0
                          : static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

/// Constant prediction of the stream's modal state (ties go OFF). The
/// accuracy equals max(p, 1-p) for ON fraction p.
inline std::pair<EventStream, double> majority_baseline(const EventStream& target) {
    std::int64_t ones = 0;
    for (Step t = 0; t < target.size(); ++t) {
        ones += target.on(t) ? 1 : 0;
    }
    const double p = static_cast<double>(ones) / static_cast<double>(target.size());
    const bool all_on = p > 0.5;
    std::vector<std::uint8_t> states(static_cast<std::size_t>(target.size()),
                                     all_on ? std::uint8_t{1} : std::uint8_t{0});
    return {EventStream(std::move(states)), std::max(p, 1.0 - p)};
}

/// The model that repeats the previous input step as output.
inline EventStream reactive_baseline(const EventStream& target) {
    std::vector<std::uint8_t> states(static_cast<std::size_t>(target.size()), 0);
    for (Step t = 1; t < target.size(); ++t) {
        states[static_cast<std::size_t>(t)] = target.on(t - 1) ? 1 : 0;
    }
    return EventStream(std::move(states));
}

}  // namespace ltddm
