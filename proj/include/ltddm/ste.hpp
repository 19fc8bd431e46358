#pragma once

#include <algorithm>
#include <cstdlib>
#include <span>
#include <utility>
#include <vector>

#include "ltddm/event_stream.hpp"

namespace ltddm {

/// Which steps of a stream count as events for timing-error purposes.
enum class EventMode {
    AllOnSteps,  ///< every ON step is an event (default)
    OnsetsOnly,  ///< only block onsets count (ablation)
};

inline std::vector<Step> events_of(const EventStream& s, EventMode mode) {
    return mode == EventMode::AllOnSteps ? event_steps(s) : onsets(s);
}

/// Signed distance from `t` to the nearest event in `events` (sorted
/// ascending): returns t - t*. Ties break toward the earlier event. When
/// `events` is empty the distance is the full horizon, a finite penalty
/// that keeps totals monotone in missed events.
inline Step nearest_event_distance(Step t, std::span<const Step> events, Horizon horizon) {
    if (events.empty()) {
        return horizon.steps;
    }
    auto it = std::lower_bound(events.begin(), events.end(), t);
    if (it == events.end()) {
        return t - events.back();
    }
    if (it == events.begin()) {
        return t - events.front();
    }
    const Step after = *it;
    const Step before = *(it - 1);
    // |t - before| vs |t - after|; equality picks the earlier event.
    if (t - before <= after - t) {
        return t - before;
    }
    return t - after;
}

/// Squared timing error of one target event against a prediction stream:
/// half the squared step distance to the nearest predicted event.
inline double ste_event(Step t, const EventStream& prediction, Horizon horizon,
                        EventMode mode = EventMode::AllOnSteps) {
    const auto ev = events_of(prediction, mode);
    const Step d = nearest_event_distance(t, ev, horizon);
    return 0.5 * static_cast<double>(d) * static_cast<double>(d);
}

/// Full symmetric squared timing error between two streams.
struct SteReport {
    double total = 0.0;
    /// (event step, squared distance) terms, target-side first then
    /// prediction-side; total is half their sum.
    std::vector<std::pair<Step, double>> per_event;
};

inline SteReport ste_full(const EventStream& target, const EventStream& prediction,
                          EventMode mode = EventMode::AllOnSteps) {
    if (target.size() != prediction.size()) {
        throw HorizonMismatch("ste_full: streams have different lengths (" +
                              std::to_string(target.size()) + " vs " +
                              std::to_string(prediction.size()) + ")");
    }
    const Horizon horizon{target.size()};
    const auto target_events = events_of(target, mode);
    const auto pred_events = events_of(prediction, mode);

    SteReport report;
    double sum = 0.0;
    for (Step t : target_events) {
        const Step d = nearest_event_distance(t, pred_events, horizon);
        const double sq = static_cast<double>(d) * static_cast<double>(d);
        report.per_event.emplace_back(t, sq);
        sum += sq;
    }
    for (Step t : pred_events) {
        const Step d = nearest_event_distance(t, target_events, horizon);
        const double sq = static_cast<double>(d) * static_cast<double>(d);
        report.per_event.emplace_back(t, sq);
        sum += sq;
    }
    report.total = 0.5 * sum;
    return report;
}

/// Derivative of the one-sided timing error 0.5*(t - eps)^2 with respect to
/// the prediction time eps. Positive iff the prediction is later than the
/// target event.
inline double grad_eps(Step t, Step eps) {
    return static_cast<double>(eps - t);
}

}  // namespace ltddm
