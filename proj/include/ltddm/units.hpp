#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ltddm/errors.hpp"
#include "ltddm/event_stream.hpp"

namespace ltddm {

/// The N-dimensional binary observation for one step. Component 0 is the
/// bias and is always 1.
struct StimulusVector {
    explicit StimulusVector(std::vector<std::uint8_t> components)
        : values(std::move(components)) {
        if (values.empty() || values[0] != 1) {
            throw DimensionMismatch("stimulus component 0 must be the bias (1)");
        }
        for (auto v : values) {
            if (v > 1) {
                throw DimensionMismatch("stimulus components must be 0/1");
            }
        }
    }

    static StimulusVector bias_only() { return StimulusVector({1}); }

    std::size_t size() const { return values.size(); }

    std::vector<std::uint8_t> values;
};

/// Nonnegative evidence totals, one per stimulus component. Component 0
/// counts elapsed steps since the last reset. Counts saturate at `cap`.
struct AccumulatorBank {
    explicit AccumulatorBank(std::size_t n,
                             std::int64_t cap_value = std::numeric_limits<std::int64_t>::max())
        : counts(n, 0), cap(cap_value) {}

    void accumulate(const StimulusVector& x) {
        if (x.size() != counts.size()) {
            throw DimensionMismatch("accumulator expects " + std::to_string(counts.size()) +
                                    " components, stimulus has " + std::to_string(x.size()));
        }
        for (std::size_t i = 0; i < counts.size(); ++i) {
            counts[i] = std::min<std::int64_t>(counts[i] + x.values[i], cap);
        }
    }

    void reset() { std::fill(counts.begin(), counts.end(), 0); }

    std::int64_t bias() const { return counts[0]; }

    std::vector<double> as_real() const {
        std::vector<double> out(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            out[i] = static_cast<double>(counts[i]);
        }
        return out;
    }

    std::vector<std::int64_t> counts;
    std::int64_t cap;
};

/// Strictly positive evidence-per-observation weights, the learnable
/// parameters.
struct DriftRates {
    explicit DriftRates(std::vector<double> weights) : w(std::move(weights)) {
        for (double v : w) {
            if (!(v > 0.0)) {
                throw DimensionMismatch("drift rates must be strictly positive");
            }
        }
    }

    static DriftRates uniform(std::size_t n, double value) {
        return DriftRates(std::vector<double>(n, value));
    }

    std::size_t size() const { return w.size(); }

    std::vector<double> w;
};

struct Threshold {
    explicit Threshold(double value = 1.0) : tau(value) {
        if (!(tau > 0.0)) {
            throw DimensionMismatch("threshold must be positive");
        }
    }

    double tau;
};

/// Relative slack below tau tolerated by the firing test. Trained weights
/// come out of hyperplane projections that can land a few ulps under tau,
/// and floored components add residuals of order the weight floor; without
/// the slack a unit that should fire on step L fires on step L+1. The
/// slack must stay well below 1/L for every usable period L.
inline constexpr double kFiringSlack = 1e-6;

/// A drift-diffusion accumulator: integrates stimuli at learned rates and
/// signals when the accumulated evidence reaches threshold.
struct TddmUnit {
    TddmUnit(std::size_t n, double init_weight, double tau_value = 1.0,
             std::int64_t cap = std::numeric_limits<std::int64_t>::max())
        : w(DriftRates::uniform(n, init_weight)), a(n, cap), tau(tau_value) {}

    TddmUnit(DriftRates rates, double tau_value = 1.0,
             std::int64_t cap = std::numeric_limits<std::int64_t>::max())
        : w(std::move(rates)), a(w.size(), cap), tau(tau_value) {}

    void accumulate(const StimulusVector& x) { a.accumulate(x); }

    double activation() const {
        double phi = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            phi += w.w[i] * static_cast<double>(a.counts[i]);
        }
        return phi;
    }

    bool fires() const { return activation() >= tau.tau * (1.0 - kFiringSlack); }

    void reset() { a.reset(); }

    DriftRates w;
    AccumulatorBank a;
    Threshold tau;
};

enum class BankId {
    OnTrigger,   ///< accumulates while OFF; reaching threshold turns the unit ON
    OffTrigger,  ///< accumulates while ON; reaching threshold turns the unit OFF
};

inline const char* to_string(BankId id) {
    return id == BankId::OnTrigger ? "on_trigger" : "off_trigger";
}

/// Bi-stable ON/OFF unit with one accumulator bank per state. Exactly one
/// bank accumulates per step: the bank of the current state. Entering a
/// state resets that state's bank; the triggering bank keeps its contents
/// and a copy is kept as `snapshot` until the next transition.
///
/// An `instantaneous` unit is the degenerate case whose ON state lasts a
/// single step: it has only the on-trigger bank and resets it at each fire.
struct BistableUnit {
    BistableUnit(std::size_t n, double init_weight, double tau_value = 1.0,
                 std::int64_t cap = std::numeric_limits<std::int64_t>::max(),
                 bool instantaneous_unit = false)
        : on_trigger(n, init_weight, tau_value, cap),
          off_trigger(n, init_weight, tau_value, cap),
          instantaneous(instantaneous_unit) {}

    bool on = false;
    TddmUnit on_trigger;
    TddmUnit off_trigger;
    bool instantaneous = false;

    /// Trigger-bank contents at the moment of the last state change; empty
    /// until the unit has transitioned once.
    std::vector<std::int64_t> snapshot;
    BankId snapshot_bank = BankId::OnTrigger;
    Step last_change = 0;

    TddmUnit& bank(BankId id) { return id == BankId::OnTrigger ? on_trigger : off_trigger; }
    const TddmUnit& bank(BankId id) const {
        return id == BankId::OnTrigger ? on_trigger : off_trigger;
    }

    BankId active_bank_id() const {
        if (instantaneous) {
            return BankId::OnTrigger;
        }
        return on ? BankId::OffTrigger : BankId::OnTrigger;
    }

    TddmUnit& active_bank() { return bank(active_bank_id()); }

    /// Free-running step: accumulate, then test the threshold, then (if
    /// firing) toggle within the same step. Returns the output for this
    /// step (the post-step state, or the fire itself for instantaneous
    /// units).
    bool step(const StimulusVector& x, Step t) {
        TddmUnit& active = active_bank();
        active.accumulate(x);
        if (!active.fires()) {
            return on;
        }
        if (instantaneous) {
            snapshot = active.a.counts;
            snapshot_bank = BankId::OnTrigger;
            active.reset();
            last_change = t;
            return true;  // ON for this step only
        }
        snapshot = active.a.counts;
        snapshot_bank = active_bank_id();
        on = !on;
        active_bank().reset();  // the entered state's bank starts fresh
        last_change = t;
        return on;
    }

    /// Clamped transition: record the trigger snapshot and move to
    /// `to_on` without testing the threshold. The triggering bank is left
    /// intact for the caller's correction step.
    void force_transition(bool to_on, Step t) {
        TddmUnit& active = active_bank();
        snapshot = active.a.counts;
        snapshot_bank = active_bank_id();
        if (!instantaneous) {
            on = to_on;
            active_bank().reset();
        }
        last_change = t;
    }

    void reset_state() {
        on = false;
        on_trigger.reset();
        off_trigger.reset();
        snapshot.clear();
        snapshot_bank = BankId::OnTrigger;
        last_change = 0;
    }
};

inline bool step_bistable(BistableUnit& unit, const StimulusVector& x, Step t) {
    return unit.step(x, t);
}

}  // namespace ltddm
