#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltddm/errors.hpp"
#include "ltddm/event_stream.hpp"
#include "ltddm/learning.hpp"
#include "ltddm/ste.hpp"
#include "ltddm/units.hpp"

namespace ltddm {

enum class Topology {
    PerStream,  ///< one single-output network per stream
    Joint,      ///< one network whose outputs cover all streams
};

enum class ModelKind {
    Tddm,   ///< instantaneous output units, no hidden layer
    Ltddm,  ///< bi-stable output units, optional hidden layer
};

struct NetworkConfig {
    std::int64_t n_inputs = 0;   ///< teacher-forced input streams (0 = bias only)
    std::int64_t n_hidden = 0;
    std::int64_t n_outputs = 1;
    double eta = 0.1;
    double tau = 1.0;
    std::int64_t epochs = 200;
    Topology topology = Topology::PerStream;
    ModelKind kind = ModelKind::Ltddm;
    std::int64_t horizon = 1;        ///< step count; also the accumulator cap
    bool reset_each_epoch = true;    ///< reset unit state at every epoch start

    void validate() const {
        if (n_outputs < 1) throw ConfigError("n_outputs must be >= 1");
        if (n_hidden < 0) throw ConfigError("n_hidden must be >= 0");
        if (n_inputs < 0) throw ConfigError("n_inputs must be >= 0");
        if (horizon < 1) throw ConfigError("horizon must be >= 1");
        if (!(tau > 0.0)) throw ConfigError("tau must be positive");
        if (!(eta > 0.0) || eta > 1.0) throw ConfigError("eta must be in (0, 1]");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (kind == ModelKind::Tddm && n_hidden != 0) {
            throw ConfigError("tddm model has no hidden layer");
        }
    }
};

/// Maps bank components to their meaning: component 0 is the bias, then the
/// input streams, then the hidden units.
struct Wiring {
    std::int64_t n_inputs = 0;
    std::int64_t n_hidden = 0;

    std::size_t bias() const { return 0; }
    std::size_t input(std::int64_t j) const { return static_cast<std::size_t>(1 + j); }
    std::size_t hidden(std::int64_t h) const {
        return static_cast<std::size_t>(1 + n_inputs + h);
    }
    std::size_t output_dim() const { return static_cast<std::size_t>(1 + n_inputs + n_hidden); }
    std::size_t hidden_dim() const { return static_cast<std::size_t>(1 + n_inputs); }
};

/// Feed-forward network of accumulator units: a free-running hidden layer
/// of bi-stable units and an output layer that sees the inputs plus the
/// hidden states.
struct LtddmNetwork {
    NetworkConfig cfg;
    std::vector<BistableUnit> hidden;
    std::vector<BistableUnit> outputs;

    static LtddmNetwork build(const NetworkConfig& cfg) {
        cfg.validate();
        LtddmNetwork net;
        net.cfg = cfg;
        const Wiring wiring{cfg.n_inputs, cfg.n_hidden};
        // Initial rates are low so untrained units predict long intervals;
        // corrections shorten them.
        const double hidden_init =
            1.0 / (static_cast<double>(wiring.hidden_dim()) * static_cast<double>(cfg.horizon));
        const double output_init =
            1.0 / (static_cast<double>(wiring.output_dim()) * static_cast<double>(cfg.horizon));
        for (std::int64_t h = 0; h < cfg.n_hidden; ++h) {
            net.hidden.emplace_back(wiring.hidden_dim(), hidden_init, cfg.tau, cfg.horizon);
        }
        for (std::int64_t o = 0; o < cfg.n_outputs; ++o) {
            net.outputs.emplace_back(wiring.output_dim(), output_init, cfg.tau, cfg.horizon,
                                     cfg.kind == ModelKind::Tddm);
        }
        return net;
    }

    Wiring wiring() const { return Wiring{cfg.n_inputs, cfg.n_hidden}; }

    void reset_state() {
        for (auto& u : hidden) u.reset_state();
        for (auto& u : outputs) u.reset_state();
    }
};

namespace detail {

inline void fill_inputs(StimulusVector& stim, std::span<const std::uint8_t> inputs_prev) {
    for (std::size_t j = 0; j < inputs_prev.size(); ++j) {
        stim.values[1 + j] = inputs_prev[j];
    }
}

/// One free step of the whole network. Hidden units run first so the
/// outputs see their post-step states. Returns output states; optionally
/// reports hidden states.
inline std::vector<std::uint8_t> free_step(LtddmNetwork& net,
                                           std::span<const std::uint8_t> inputs_prev, Step t,
                                           StimulusVector& hidden_stim,
                                           StimulusVector& output_stim,
                                           std::vector<std::uint8_t>* hidden_states) {
    const Wiring wiring = net.wiring();
    fill_inputs(hidden_stim, inputs_prev);
    fill_inputs(output_stim, inputs_prev);
    for (std::int64_t h = 0; h < net.cfg.n_hidden; ++h) {
        const bool s = net.hidden[static_cast<std::size_t>(h)].step(hidden_stim, t);
        output_stim.values[wiring.hidden(h)] = s ? 1 : 0;
        if (hidden_states) (*hidden_states)[static_cast<std::size_t>(h)] = s ? 1 : 0;
    }
    std::vector<std::uint8_t> out(static_cast<std::size_t>(net.cfg.n_outputs), 0);
    for (std::int64_t o = 0; o < net.cfg.n_outputs; ++o) {
        out[static_cast<std::size_t>(o)] =
            net.outputs[static_cast<std::size_t>(o)].step(output_stim, t) ? 1 : 0;
    }
    return out;
}

inline StimulusVector make_stimulus(std::size_t dim) {
    std::vector<std::uint8_t> v(dim, 0);
    v[0] = 1;
    return StimulusVector(std::move(v));
}

}  // namespace detail

/// Advance the network one step on the previous-step observation and return
/// the output states.
inline std::vector<std::uint8_t> forward_step(LtddmNetwork& net,
                                              std::span<const std::uint8_t> inputs_prev,
                                              Step t) {
    if (static_cast<std::int64_t>(inputs_prev.size()) != net.cfg.n_inputs) {
        throw DimensionMismatch("forward_step: expected " + std::to_string(net.cfg.n_inputs) +
                                " inputs");
    }
    auto hidden_stim = detail::make_stimulus(net.wiring().hidden_dim());
    auto output_stim = detail::make_stimulus(net.wiring().output_dim());
    return detail::free_step(net, inputs_prev, t, hidden_stim, output_stim, nullptr);
}

struct FreeRunOptions {
    Step steps = 0;
    bool autoregressive = false;  ///< feed own predictions back as inputs
    bool reset_state = true;      ///< start from pristine units anchored at step 0
    bool capture_hidden = false;
};

struct FreeRunResult {
    std::vector<EventStream> outputs;
    std::vector<EventStream> hidden;
};

/// Run the network unclamped for `opts.steps` steps. Inputs are the
/// previous target step (teacher forcing) unless `autoregressive`. The run
/// operates on a copy; the caller's network is untouched. With
/// `reset_state` the units are anchored at step 0 and dynamics begin at
/// step 1; without it the pass continues from the network's current state.
inline FreeRunResult free_run(LtddmNetwork net, const std::vector<EventStream>* teacher,
                              const FreeRunOptions& opts) {
    const Step T = opts.steps;
    if (T < 1) throw ConfigError("free_run: steps must be >= 1");
    const std::int64_t n_in = net.cfg.n_inputs;
    if (n_in > 0) {
        if (opts.autoregressive) {
            if (n_in != net.cfg.n_outputs) {
                throw DimensionMismatch("autoregressive run requires n_inputs == n_outputs");
            }
        } else {
            if (!teacher || static_cast<std::int64_t>(teacher->size()) < n_in) {
                throw DimensionMismatch("teacher-forced run requires one stream per input");
            }
            for (const auto& s : *teacher) {
                if (s.size() < T) {
                    throw HorizonMismatch("teacher stream shorter than the requested run");
                }
            }
        }
    }

    std::vector<std::vector<std::uint8_t>> out_states(
        static_cast<std::size_t>(net.cfg.n_outputs),
        std::vector<std::uint8_t>(static_cast<std::size_t>(T), 0));
    std::vector<std::vector<std::uint8_t>> hidden_trace;
    if (opts.capture_hidden) {
        hidden_trace.assign(static_cast<std::size_t>(net.cfg.n_hidden),
                            std::vector<std::uint8_t>(static_cast<std::size_t>(T), 0));
    }

    auto hidden_stim = detail::make_stimulus(net.wiring().hidden_dim());
    auto output_stim = detail::make_stimulus(net.wiring().output_dim());
    std::vector<std::uint8_t> inputs_prev(static_cast<std::size_t>(n_in), 0);
    std::vector<std::uint8_t> hidden_now(static_cast<std::size_t>(net.cfg.n_hidden), 0);

    Step start = 0;
    if (opts.reset_state) {
        net.reset_state();
        // Step 0 is the anchor: units emit their initial state.
        start = 1;
    }
    for (Step t = start; t < T; ++t) {
        for (std::int64_t j = 0; j < n_in; ++j) {
            std::uint8_t x = 0;
            if (t > 0) {
                x = opts.autoregressive
                        ? out_states[static_cast<std::size_t>(j)][static_cast<std::size_t>(t - 1)]
                        : static_cast<std::uint8_t>(
                              (*teacher)[static_cast<std::size_t>(j)].on(t - 1) ? 1 : 0);
            }
            inputs_prev[static_cast<std::size_t>(j)] = x;
        }
        const auto states = detail::free_step(net, inputs_prev, t, hidden_stim, output_stim,
                                              opts.capture_hidden ? &hidden_now : nullptr);
        for (std::int64_t o = 0; o < net.cfg.n_outputs; ++o) {
            out_states[static_cast<std::size_t>(o)][static_cast<std::size_t>(t)] =
                states[static_cast<std::size_t>(o)];
        }
        if (opts.capture_hidden) {
            for (std::int64_t h = 0; h < net.cfg.n_hidden; ++h) {
                hidden_trace[static_cast<std::size_t>(h)][static_cast<std::size_t>(t)] =
                    hidden_now[static_cast<std::size_t>(h)];
            }
        }
    }

    FreeRunResult result;
    for (auto& s : out_states) result.outputs.emplace_back(std::move(s));
    for (auto& s : hidden_trace) result.hidden.emplace_back(std::move(s));
    return result;
}

/// Observation points inside one training epoch; used by tests and
/// diagnostics.
struct EpochObserver {
    virtual ~EpochObserver() = default;
    virtual void output_transition(std::size_t /*output*/, Step /*t*/, bool /*to_on*/,
                                   std::int64_t /*window*/) {}
    virtual void hidden_request(std::size_t /*hidden*/, Step /*t*/, double /*g*/,
                                std::int64_t /*a_th*/, std::int64_t /*a_t1*/,
                                const TimingShiftRequest& /*req*/) {}
};

/// One clamped training pass over the targets followed by a free-run
/// evaluation. Output transitions are forced at target onsets/offsets and
/// each forced transition corrects the triggering bank; the dual gradients
/// of all outputs transitioning on a step are summed and routed to the
/// hidden units. Unit-level error signals (empty banks, degenerate
/// windows) skip the affected update and never abort the epoch.
///
/// The returned value is the squared timing error of a non-clamped pass by
/// a clone that keeps the post-epoch unit state, summed over streams.
inline double train_epoch(LtddmNetwork& net, const std::vector<EventStream>& targets,
                          LearningRate eta, bool fresh_start = true,
                          EpochObserver* observer = nullptr) {
    if (static_cast<std::int64_t>(targets.size()) != net.cfg.n_outputs) {
        throw DimensionMismatch("train_epoch: one target stream per output required");
    }
    const Step T = targets[0].size();
    for (const auto& s : targets) {
        if (s.size() != T) throw HorizonMismatch("train_epoch: target lengths differ");
    }
    const std::int64_t n_in = net.cfg.n_inputs;
    if (n_in != 0 && n_in != static_cast<std::int64_t>(targets.size())) {
        throw DimensionMismatch("train_epoch: inputs must map 1:1 onto target streams");
    }
    const Wiring wiring = net.wiring();
    const bool instantaneous = net.cfg.kind == ModelKind::Tddm;

    auto hidden_stim = detail::make_stimulus(wiring.hidden_dim());
    auto output_stim = detail::make_stimulus(wiring.output_dim());
    std::vector<std::uint8_t> inputs_prev(static_cast<std::size_t>(n_in), 0);

    struct TransitionInfo {
        std::vector<double> grad;        // dual gradient at the transition
        std::vector<std::int64_t> counts;  // trigger-bank counts at the transition
    };
    std::vector<TransitionInfo> transitions;

    Step start = 0;
    if (fresh_start) {
        net.reset_state();
        start = 1;
        // Anchor step: clamp output state to the first target step without
        // any correction (no evidence has been seen yet).
        if (!instantaneous) {
            for (std::size_t o = 0; o < targets.size(); ++o) {
                if (targets[o].on(0) != net.outputs[o].on) {
                    net.outputs[o].force_transition(targets[o].on(0), 0);
                }
            }
        }
    }

    for (Step t = start; t < T; ++t) {
        for (std::int64_t j = 0; j < n_in; ++j) {
            inputs_prev[static_cast<std::size_t>(j)] =
                t > 0 ? static_cast<std::uint8_t>(
                            targets[static_cast<std::size_t>(j)].on(t - 1) ? 1 : 0)
                      : 0;
        }
        detail::fill_inputs(hidden_stim, inputs_prev);
        detail::fill_inputs(output_stim, inputs_prev);
        for (std::int64_t h = 0; h < net.cfg.n_hidden; ++h) {
            const bool s = net.hidden[static_cast<std::size_t>(h)].step(hidden_stim, t);
            output_stim.values[wiring.hidden(h)] = s ? 1 : 0;
        }

        transitions.clear();
        for (std::size_t o = 0; o < net.outputs.size(); ++o) {
            BistableUnit& unit = net.outputs[o];
            unit.active_bank().accumulate(output_stim);
            const bool target_on = targets[o].on(t);
            const bool forced = instantaneous ? target_on : (target_on != unit.on);
            if (!forced) {
                continue;  // free threshold crossings are suppressed while clamped
            }
            const BankId trigger_id = unit.active_bank_id();
            TddmUnit& trigger = unit.bank(trigger_id);
            TransitionInfo info;
            info.counts = trigger.a.counts;
            info.grad = grad_a(trigger.w, trigger.a, trigger.tau.tau);
            if (observer) {
                observer->output_transition(o, t, target_on, info.counts[wiring.bias()]);
            }
            unit.force_transition(target_on, t);
            try {
                correct_output_clamped(unit, trigger_id, eta);
            } catch (const ZeroAccumulator&) {
                // nothing observed since the last transition; skip
            }
            transitions.push_back(std::move(info));
        }

        if (!transitions.empty() && net.cfg.n_hidden > 0) {
            std::vector<std::vector<double>> grads;
            grads.reserve(transitions.size());
            for (auto& tr : transitions) grads.push_back(tr.grad);
            // Window bookkeeping follows the first transitioning output.
            const auto& lead = transitions.front();
            const std::int64_t a_t1 = lead.counts[wiring.bias()];
            const CorrectionWindow window{t - a_t1, t};
            for (std::int64_t h = 0; h < net.cfg.n_hidden; ++h) {
                const double g = sum_hidden_requests(grads, wiring.hidden(h));
                const std::int64_t a_th = lead.counts[wiring.hidden(h)];
                BistableUnit& hu = net.hidden[static_cast<std::size_t>(h)];
                const TimingShiftRequest req = route_hidden_correction(hu, g, window, a_th, a_t1);
                if (observer) {
                    observer->hidden_request(static_cast<std::size_t>(h), t, g, a_th, a_t1, req);
                }
                if (!req.applies) continue;
                try {
                    apply_timing_shift(hu, req, eta);
                } catch (const DegenerateWindow&) {
                    // no usable window on the hidden side; skip
                }
            }
        }
    }

    // Evaluate with frozen weights: clamped outputs trivially match the
    // targets, so the learning curve reflects unclamped behaviour. The
    // probe keeps the end-of-epoch unit state so a converged periodic
    // network scores exactly zero.
    FreeRunOptions eval_opts;
    eval_opts.steps = T;
    eval_opts.reset_state = false;
    const FreeRunResult eval = free_run(net, &targets, eval_opts);
    double total = 0.0;
    for (std::size_t o = 0; o < targets.size(); ++o) {
        total += ste_full(targets[o], eval.outputs[o]).total;
    }
    return total;
}

/// First epoch index from which consecutive epoch errors stay within
/// delta * max(trace[0], 1) of each other for k epochs (or to the end of a
/// shorter trace).
inline std::optional<std::size_t> detect_convergence(std::span<const double> trace,
                                                     double delta = 0.01, std::size_t k = 5) {
    if (trace.size() < 2) {
        return std::nullopt;
    }
    const double threshold = delta * std::max(trace[0], 1.0);
    const std::size_t last_diff = trace.size() - 2;
    for (std::size_t e = 0; e + 1 < trace.size(); ++e) {
        const std::size_t hi = std::min(e + k - 1, last_diff);
        bool stable = true;
        for (std::size_t i = e; i <= hi; ++i) {
            if (std::abs(trace[i] - trace[i + 1]) >= threshold) {
                stable = false;
                break;
            }
        }
        if (stable) {
            return e;
        }
    }
    return std::nullopt;
}

struct TrainTrace {
    std::vector<double> epoch_ste;
    std::vector<bool> converged;
    std::optional<std::size_t> convergence_epoch;
};

struct TrainOptions {
    std::int64_t epochs = 200;
    double eta = 0.1;
    double convergence_delta = 0.01;
    std::size_t convergence_k = 5;
};

/// Full training loop: `epochs` clamped passes with per-epoch evaluation.
inline TrainTrace train(LtddmNetwork& net, const std::vector<EventStream>& targets,
                        const TrainOptions& opts) {
    TrainTrace trace;
    const LearningRate eta(opts.eta);
    for (std::int64_t epoch = 0; epoch < opts.epochs; ++epoch) {
        const bool fresh = net.cfg.reset_each_epoch || epoch == 0;
        trace.epoch_ste.push_back(train_epoch(net, targets, eta, fresh));
    }
    trace.convergence_epoch =
        detect_convergence(trace.epoch_ste, opts.convergence_delta, opts.convergence_k);
    trace.converged.assign(trace.epoch_ste.size(), false);
    if (trace.convergence_epoch) {
        for (std::size_t i = *trace.convergence_epoch; i < trace.converged.size(); ++i) {
            trace.converged[i] = true;
        }
    }
    return trace;
}

}  // namespace ltddm
