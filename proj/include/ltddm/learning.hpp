#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltddm/errors.hpp"
#include "ltddm/units.hpp"

namespace ltddm {

/// Weights never drop below this floor; negative stimulus is undefined, so
/// drift rates stay in the positive cone.
inline constexpr double kWeightFloor = 1e-8;

/// Floor for the accumulator scaling factor. Requested shifts larger than
/// the elapsed window would otherwise flip the scaled counts negative.
inline constexpr double kLambdaFloor = 1e-6;

/// A single timing-shift request may retime a bank by at most this fraction
/// of its elapsed window. Early in training the summed dual gradients can
/// demand shifts of hundreds of steps; scaling the counts by a near-zero
/// lambda would then explode the projected weights. Near a fixed point the
/// requests are small and pass through unclamped.
inline constexpr double kMaxShiftFraction = 0.1;

struct LearningRate {
    explicit LearningRate(double value) : eta(value) {
        if (!(eta > 0.0) || eta > 1.0) {
            throw ConfigError("learning rate must be in (0, 1]");
        }
    }

    double eta;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

/// Scale factor for a bank's accumulated counts given the timing-error
/// gradient with respect to the fire time: (a1 - grad) / a1. A unit that
/// fired on time has grad 0 and scale 1; a late fire (positive grad)
/// shrinks the counts so the projected weights speed the unit up.
inline double lambda_scale(std::int64_t a_bias, double grad_eps_value) {
    if (a_bias <= 0) {
        throw DegenerateWindow("lambda_scale: zero elapsed steps");
    }
    const double lambda =
        (static_cast<double>(a_bias) - grad_eps_value) / static_cast<double>(a_bias);
    return std::max(lambda, kLambdaFloor);
}

/// Gradient of the one-sided timing error with respect to the drift rates:
/// (w.a - tau) a / |a|^2. Subtracting the full gradient projects w onto the
/// hyperplane w.a = tau.
inline std::vector<double> grad_w(std::span<const double> w, std::span<const double> a,
                                  double tau) {
    if (w.size() != a.size()) {
        throw DimensionMismatch("grad_w: dimension mismatch");
    }
    const double n2 = squared_norm(a);
    if (n2 == 0.0) {
        throw ZeroAccumulator("grad_w: accumulator bank is all zero");
    }
    const double residual = dot(w, a) - tau;
    std::vector<double> g(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        g[i] = residual * a[i] / n2;
    }
    return g;
}

inline std::vector<double> grad_w(const DriftRates& w, const AccumulatorBank& a, double tau) {
    return grad_w(w.w, a.as_real(), tau);
}

/// Dual gradient, with respect to the accumulated counts: (w.a - tau) w /
/// |w|^2. It answers how much stimulus the unit should have seen, and is
/// what gets propagated to the layer below.
inline std::vector<double> grad_a(std::span<const double> w, std::span<const double> a,
                                  double tau) {
    if (w.size() != a.size()) {
        throw DimensionMismatch("grad_a: dimension mismatch");
    }
    const double n2 = squared_norm(w);
    const double residual = dot(w, a) - tau;
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        g[i] = residual * w[i] / n2;
    }
    return g;
}

inline std::vector<double> grad_a(const DriftRates& w, const AccumulatorBank& a, double tau) {
    return grad_a(w.w, a.as_real(), tau);
}

/// Gradient-descent step on the drift rates, floored to keep them positive.
inline DriftRates apply_weight_update(const DriftRates& w, std::span<const double> grad,
                                      LearningRate eta) {
    if (w.size() != grad.size()) {
        throw DimensionMismatch("apply_weight_update: dimension mismatch");
    }
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = std::max(w.w[i] - eta.eta * grad[i], kWeightFloor);
    }
    return DriftRates(std::move(out));
}

/// Correction applied when an output unit's transition is clamped to a
/// target event: the transition carries no timing error (scale 1), so the
/// triggering bank's weights are projected toward w.a = tau and the bank is
/// reset. Throws ZeroAccumulator when the bank saw nothing; callers skip
/// the update.
inline void correct_output_clamped(BistableUnit& unit, BankId bank_id, LearningRate eta) {
    TddmUnit& bank = unit.bank(bank_id);
    const auto grad = grad_w(bank.w, bank.a, bank.tau.tau);
    bank.w = apply_weight_update(bank.w, grad, eta);
    bank.a.reset();
}

/// Sum of one component of the output units' dual gradients: the total
/// stimulus change the layer above requests from hidden unit `component`.
inline double sum_hidden_requests(const std::vector<std::vector<double>>& output_grads,
                                  std::size_t component) {
    double total = 0.0;
    for (const auto& g : output_grads) {
        total += g[component];
    }
    return total;
}

enum class Boundary {
    LastChange,  ///< retime the unit's most recent transition (uses the snapshot)
    NextChange,  ///< retime the upcoming transition (uses the live bank)
};

/// A correction request handed down to a hidden unit. `delta_eps` is the
/// requested shift of the boundary in steps, positive meaning later.
struct TimingShiftRequest {
    double delta_eps = 0.0;
    Boundary boundary = Boundary::LastChange;
    BankId bank = BankId::OnTrigger;
    bool applies = false;
};

/// The span since the output unit's previous state change.
struct CorrectionWindow {
    Step start = 0;  ///< t - a_t1
    Step end = 0;    ///< current step t

    Step length() const { return end - start; }
};

/// Decide how a hidden unit should absorb a summed correction request `g`
/// (positive: the outputs want fewer ON steps from it; negative: more).
///
/// `a_th` is the number of hidden-ON steps the output observed within the
/// window and `a_t1` the window length. A unit partially ON over the window
/// toggled inside it, so the timing of its most recent boundary is moved:
/// later for g > 0 on the ON boundary, the mirrored direction on the OFF
/// boundary. A unit that was silent (or saturated ON) can only have its
/// next boundary pulled sooner; asking a silent unit for fewer stimuli, or
/// a saturated one for more, is a no-op.
///
/// The shift is capped by what the window can express: it cannot remove
/// more ON steps than were observed, nor add more than the window's OFF
/// remainder. Beyond those bounds the gradient magnitude carries no
/// information about this window.
inline TimingShiftRequest route_hidden_correction(const BistableUnit& hidden, double g,
                                                  const CorrectionWindow& window,
                                                  std::int64_t a_th, std::int64_t a_t1) {
    (void)window;
    TimingShiftRequest req;
    const double removable = static_cast<double>(a_th);
    const double addable = static_cast<double>(a_t1 - a_th);
    if (a_th > 0 && a_th < a_t1) {
        req.applies = true;
        req.boundary = Boundary::LastChange;
        if (hidden.on) {
            req.bank = BankId::OnTrigger;
            // later onset trims coverage; earlier onset adds it
            req.delta_eps = std::clamp(g, -addable, removable);
        } else {
            req.bank = BankId::OffTrigger;
            // later offset adds coverage; earlier offset trims it
            req.delta_eps = std::clamp(-g, -removable, addable);
        }
        return req;
    }
    if (a_th == 0) {
        if (-g > 0.0) {
            req.applies = true;
            req.boundary = Boundary::NextChange;
            req.bank = BankId::OnTrigger;
            req.delta_eps = std::clamp(g, -addable, 0.0);  // negative: turn on sooner
        }
        return req;
    }
    // a_th == a_t1: ON throughout the window.
    if (-g < 0.0) {
        req.applies = true;
        req.boundary = Boundary::NextChange;
        req.bank = BankId::OffTrigger;
        req.delta_eps = std::clamp(-g, -removable, 0.0);  // negative: turn off sooner
    }
    return req;
}

/// Apply a routed shift to a hidden unit: scale the selected bank's counts
/// so they describe a boundary `delta_eps` steps later (snapshot counts for
/// LastChange, live counts for NextChange), then project that bank's
/// weights toward the scaled hyperplane with step `eta`.
inline void apply_timing_shift(BistableUnit& hidden, const TimingShiftRequest& req,
                               LearningRate eta) {
    if (!req.applies) {
        return;
    }
    std::vector<double> source;
    if (req.boundary == Boundary::LastChange) {
        if (hidden.snapshot.empty() || hidden.snapshot_bank != req.bank) {
            throw DegenerateWindow("apply_timing_shift: no snapshot for the requested bank");
        }
        source.reserve(hidden.snapshot.size());
        for (auto c : hidden.snapshot) {
            source.push_back(static_cast<double>(c));
        }
    } else {
        source = hidden.bank(req.bank).a.as_real();
    }
    const std::int64_t a_bias = static_cast<std::int64_t>(source.empty() ? 0 : source[0]);
    if (a_bias <= 0) {
        throw DegenerateWindow("apply_timing_shift: empty correction window");
    }
    const double bound = kMaxShiftFraction * static_cast<double>(a_bias);
    const double delta = std::clamp(req.delta_eps, -bound, bound);
    // Shifting a boundary later by delta is a fire-time gradient of -delta.
    const double lambda = lambda_scale(a_bias, -delta);
    for (double& v : source) {
        v *= lambda;
    }
    TddmUnit& bank = hidden.bank(req.bank);
    const auto grad = grad_w(bank.w.w, source, bank.tau.tau);
    bank.w = apply_weight_update(bank.w, grad, eta);
}

}  // namespace ltddm
