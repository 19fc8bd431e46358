// Experiment runner for the ltddm library: train and evaluate event-timing
// models, generate predictions, score timing error, synthesize targets.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltddm/ltddm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ltddm;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << content;
}

std::string fmt(double v) { return detail::format_double(v); }

/// Applies values from a flat JSON config to options the user did not pass
/// on the command line. Flags always win over the file.
class ConfigMerge {
public:
    template <typename T>
    void bind(CLI::Option* opt, const std::string& key, T& target) {
        entries_.emplace_back(opt, key, [&target](const json& v) { target = v.get<T>(); });
    }

    void apply(const std::string& config_path) const {
        if (config_path.empty()) {
            return;
        }
        json cfg;
        try {
            cfg = json::parse(read_file(config_path));
        } catch (const json::exception& e) {
            throw ConfigError("bad config file: " + std::string(e.what()));
        }
        if (!cfg.is_object()) {
            throw ConfigError("config file must hold a flat JSON object");
        }
        for (const auto& [key, value] : cfg.items()) {
            bool known = false;
            for (const auto& [opt, name, setter] : entries_) {
                if (name == key) {
                    known = true;
                    if (opt->count() == 0) {
                        try {
                            setter(value);
                        } catch (const json::exception&) {
                            throw ConfigError("config key '" + key + "' has the wrong type");
                        }
                    }
                    break;
                }
            }
            if (!known) {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    }

private:
    std::vector<std::tuple<CLI::Option*, std::string, std::function<void(const json&)>>> entries_;
};

struct DataOpts {
    std::string path;
    std::string kind = "events";
    double peak_threshold = 0.5;
    std::int64_t peak_min_sep = 1;
    std::int64_t price_window = 14;
    double price_z = 0.7;
};

void add_data_options(CLI::App* cmd, DataOpts& opts, ConfigMerge& merge, bool required) {
    auto* data = cmd->add_option("--data", opts.path, "input data file");
    if (required) {
        data->required();
    }
    merge.bind(data, "data", opts.path);
    auto* kind = cmd->add_option("--data-kind", opts.kind,
                                 "events | signal | prices | notes (default events)");
    merge.bind(kind, "data-kind", opts.kind);
    auto* pt = cmd->add_option("--peak-threshold", opts.peak_threshold,
                               "signal ingestion: peak detection threshold");
    merge.bind(pt, "peak-threshold", opts.peak_threshold);
    auto* ps = cmd->add_option("--peak-min-sep", opts.peak_min_sep,
                               "signal ingestion: minimum peak separation in steps");
    merge.bind(ps, "peak-min-sep", opts.peak_min_sep);
    auto* pw = cmd->add_option("--price-window", opts.price_window,
                               "price ingestion: rolling window length in days");
    merge.bind(pw, "price-window", opts.price_window);
    auto* pz = cmd->add_option("--price-z", opts.price_z,
                               "price ingestion: threshold in standard deviations");
    merge.bind(pz, "price-z", opts.price_z);
}

EventTable load_table(const DataOpts& opts) {
    const std::string text = read_file(opts.path);
    if (opts.kind == "events") {
        return load_event_csv(text, opts.path);
    }
    if (opts.kind == "signal") {
        const auto signal = load_signal_csv(text);
        EventTable table;
        table.meta = opts.path;
        table.names = signal.names;
        for (const auto& samples : signal.samples) {
            table.streams.push_back(detect_peaks(samples, opts.peak_threshold, opts.peak_min_sep));
        }
        return table;
    }
    if (opts.kind == "prices") {
        const auto prices = load_price_csv(text);
        EventTable table;
        table.meta = opts.path;
        table.names = prices.names;
        for (const auto& closes : prices.closes) {
            table.streams.push_back(discretize_prices(
                closes, static_cast<std::size_t>(opts.price_window), opts.price_z));
        }
        return table;
    }
    if (opts.kind == "notes") {
        auto table = parse_kern_subset(text);
        table.meta = opts.path;
        return table;
    }
    throw ConfigError("unknown data kind '" + opts.kind + "'");
}

struct MetricsRow {
    std::string label;
    std::optional<ConfusionCounts> counts;
    double precision_v = 0;
    double recall_v = 0;
    double f1_v = 0;
    double accuracy_v = 0;
    double ste_v = 0;
};

MetricsRow score_row(const std::string& label, const EventStream& target,
                     const EventStream& prediction, EventMode mode) {
    MetricsRow row;
    row.label = label;
    row.counts = confusion(target, prediction);
    row.precision_v = precision(*row.counts);
    row.recall_v = recall(*row.counts);
    row.f1_v = f1(*row.counts);
    row.accuracy_v = accuracy(*row.counts);
    row.ste_v = ste_full(target, prediction, mode).total;
    return row;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "stream,tp,fp,fn,tn,precision,recall,f1,accuracy,ste\n";
    for (const auto& r : rows) {
        out += r.label + ",";
        if (r.counts) {
            out += std::to_string(r.counts->tp) + "," + std::to_string(r.counts->fp) + "," +
                   std::to_string(r.counts->fn) + "," + std::to_string(r.counts->tn) + ",";
        } else {
            out += ",,,,";
        }
        out += fmt(r.precision_v) + "," + fmt(r.recall_v) + "," + fmt(r.f1_v) + "," +
               fmt(r.accuracy_v) + "," + fmt(r.ste_v) + "\n";
    }
    return out;
}

/// Appends pooled (micro) and macro rows over the per-stream rows.
void append_summary_rows(std::vector<MetricsRow>& rows, double total_ste) {
    ConfusionCounts pooled;
    double mp = 0;
    double mr = 0;
    double mf = 0;
    double ma = 0;
    double ms = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        pooled += *r.counts;
        mp += r.precision_v;
        mr += r.recall_v;
        mf += r.f1_v;
        ma += r.accuracy_v;
        ms += r.ste_v;
    }
    MetricsRow micro;
    micro.label = "pooled";
    micro.counts = pooled;
    micro.precision_v = precision(pooled);
    micro.recall_v = recall(pooled);
    micro.f1_v = f1(pooled);
    micro.accuracy_v = accuracy(pooled);
    micro.ste_v = total_ste;
    MetricsRow macro;
    macro.label = "macro";
    macro.precision_v = mp / n;
    macro.recall_v = mr / n;
    macro.f1_v = mf / n;
    macro.accuracy_v = ma / n;
    macro.ste_v = ms / n;
    rows.push_back(micro);
    rows.push_back(macro);
}

struct ModelOpts {
    std::string model = "ltddm";
    std::int64_t hidden = -1;  // -1: one per output for ltddm, none for tddm
    double lr = 0.1;
    double tau = 1.0;
    std::int64_t epochs = 200;
    std::string topology;  // empty: per-stream, joint for note data
    bool bias_only = false;
    bool no_epoch_reset = false;
};

void add_model_options(CLI::App* cmd, ModelOpts& opts, ConfigMerge& merge) {
    merge.bind(cmd->add_option("--model", opts.model, "tddm | ltddm (default ltddm)"), "model",
               opts.model);
    merge.bind(cmd->add_option("--hidden", opts.hidden, "hidden units per network"), "hidden",
               opts.hidden);
    merge.bind(cmd->add_option("--lr", opts.lr, "learning rate (default 0.1)"), "lr", opts.lr);
    merge.bind(cmd->add_option("--tau", opts.tau, "activation threshold (default 1)"), "tau",
               opts.tau);
    merge.bind(cmd->add_option("--epochs", opts.epochs, "training epochs (default 200)"),
               "epochs", opts.epochs);
    merge.bind(cmd->add_option("--topology", opts.topology,
                               "per-stream | joint (default per-stream; joint for notes)"),
               "topology", opts.topology);
    merge.bind(cmd->add_flag("--bias-only", opts.bias_only,
                             "drop the previous-step input; units see only the bias"),
               "bias-only", opts.bias_only);
    merge.bind(cmd->add_flag("--no-epoch-reset", opts.no_epoch_reset,
                             "carry unit state across epoch replays"),
               "no-epoch-reset", opts.no_epoch_reset);
}

Topology resolve_topology(const ModelOpts& model, const DataOpts& data) {
    if (model.topology.empty()) {
        return data.kind == "notes" ? Topology::Joint : Topology::PerStream;
    }
    if (model.topology == "per-stream") return Topology::PerStream;
    if (model.topology == "joint") return Topology::Joint;
    throw ConfigError("unknown topology '" + model.topology + "'");
}

ModelKind resolve_kind(const ModelOpts& model) {
    if (model.model == "tddm") return ModelKind::Tddm;
    if (model.model == "ltddm") return ModelKind::Ltddm;
    throw ConfigError("unknown model '" + model.model + "'");
}

std::vector<LtddmNetwork> build_networks(const ModelOpts& model, Topology topology,
                                         std::size_t n_streams, Step horizon) {
    const ModelKind kind = resolve_kind(model);
    const std::int64_t outputs_per_net =
        topology == Topology::Joint ? static_cast<std::int64_t>(n_streams) : 1;
    std::int64_t hidden = model.hidden;
    if (hidden < 0) {
        hidden = kind == ModelKind::Tddm ? 0 : outputs_per_net;
    }
    NetworkConfig cfg;
    cfg.kind = kind;
    cfg.topology = topology;
    cfg.n_outputs = outputs_per_net;
    cfg.n_inputs = model.bias_only ? 0 : outputs_per_net;
    cfg.n_hidden = hidden;
    cfg.eta = model.lr;
    cfg.tau = model.tau;
    cfg.epochs = model.epochs;
    cfg.horizon = horizon;
    cfg.reset_each_epoch = !model.no_epoch_reset;

    const std::size_t n_nets = topology == Topology::Joint ? 1 : n_streams;
    std::vector<LtddmNetwork> nets;
    nets.reserve(n_nets);
    for (std::size_t i = 0; i < n_nets; ++i) {
        nets.push_back(LtddmNetwork::build(cfg));
    }
    return nets;
}

std::vector<std::vector<EventStream>> targets_per_net(const EventTable& table,
                                                      Topology topology) {
    if (topology == Topology::Joint) {
        return {table.streams};
    }
    std::vector<std::vector<EventStream>> out;
    out.reserve(table.streams.size());
    for (const auto& s : table.streams) {
        out.push_back({s});
    }
    return out;
}

void run_parallel(std::size_t jobs, std::int64_t workers,
                  const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || jobs <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(workers), jobs);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < jobs; i += n_threads) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// train

int run_train(const DataOpts& data_opts, const ModelOpts& model_opts, const std::string& out_dir,
              std::int64_t seed, std::int64_t workers, bool plot) {
    const EventTable table = load_table(data_opts);
    const Topology topology = resolve_topology(model_opts, data_opts);
    auto nets = build_networks(model_opts, topology, table.streams.size(), table.horizon());
    const auto targets = targets_per_net(table, topology);

    std::vector<TrainTrace> traces(nets.size());
    TrainOptions train_opts;
    train_opts.epochs = model_opts.epochs;
    train_opts.eta = model_opts.lr;
    run_parallel(nets.size(), workers,
                 [&](std::size_t i) { traces[i] = train(nets[i], targets[i], train_opts); });

    std::vector<double> total(static_cast<std::size_t>(model_opts.epochs), 0.0);
    for (const auto& trace : traces) {
        for (std::size_t e = 0; e < trace.epoch_ste.size(); ++e) {
            total[e] += trace.epoch_ste[e];
        }
    }
    const auto convergence = detect_convergence(total);

    fs::create_directories(out_dir);
    ModelBundle bundle;
    bundle.kind = resolve_kind(model_opts);
    bundle.topology = topology;
    bundle.eta = model_opts.lr;
    bundle.epochs = model_opts.epochs;
    bundle.seed = seed;
    bundle.stream_names = table.names;
    bundle.nets = std::move(nets);
    const fs::path ckpt_path = fs::path(out_dir) / "checkpoint.txt";
    write_file(ckpt_path, save_checkpoint(bundle));

    std::string curve = "epoch,ste_total,ste_mean,converged\n";
    const double n_streams = static_cast<double>(table.streams.size());
    for (std::size_t e = 0; e < total.size(); ++e) {
        const bool converged = convergence && e >= *convergence;
        curve += std::to_string(e) + "," + fmt(total[e]) + "," + fmt(total[e] / n_streams) + "," +
                 (converged ? "1" : "0") + "\n";
    }
    const fs::path curve_path = fs::path(out_dir) / "ste_curve.csv";
    write_file(curve_path, curve);

    if (plot) {
        std::vector<double> mean_curve(total.size());
        for (std::size_t e = 0; e < total.size(); ++e) mean_curve[e] = total[e] / n_streams;
        write_file(fs::path(out_dir) / "ste_curve.svg",
                   svg_learning_curve(mean_curve, convergence, "mean STE per epoch"));
    }

    std::cout << "streams " << table.streams.size() << "\n";
    std::cout << "epochs " << model_opts.epochs << "\n";
    std::cout << "final_ste " << fmt(total.back()) << "\n";
    std::cout << "converged_epoch "
              << (convergence ? std::to_string(*convergence) : std::string("none")) << "\n";
    std::cout << "checkpoint " << ckpt_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

std::vector<EventStream> predict_all(const ModelBundle& bundle, const EventTable& table) {
    std::vector<EventStream> predictions;
    if (bundle.topology == Topology::Joint) {
        if (bundle.nets.size() != 1 ||
            bundle.nets[0].cfg.n_outputs != static_cast<std::int64_t>(table.streams.size())) {
            throw DimensionMismatch("checkpoint outputs do not match the data streams");
        }
        FreeRunOptions opts;
        opts.steps = table.horizon();
        auto run = free_run(bundle.nets[0], &table.streams, opts);
        predictions = std::move(run.outputs);
    } else {
        if (bundle.nets.size() != table.streams.size()) {
            throw DimensionMismatch("checkpoint has " + std::to_string(bundle.nets.size()) +
                                    " networks for " + std::to_string(table.streams.size()) +
                                    " streams");
        }
        for (std::size_t i = 0; i < bundle.nets.size(); ++i) {
            const std::vector<EventStream> teacher{table.streams[i]};
            FreeRunOptions opts;
            opts.steps = table.horizon();
            auto run = free_run(bundle.nets[i], &teacher, opts);
            predictions.push_back(std::move(run.outputs[0]));
        }
    }
    return predictions;
}

int run_eval(const std::string& checkpoint_path, const DataOpts& data_opts,
             const std::string& out_dir, bool onsets_only) {
    const auto bundle = load_checkpoint(read_file(checkpoint_path));
    const EventTable table = load_table(data_opts);
    const EventMode mode = onsets_only ? EventMode::OnsetsOnly : EventMode::AllOnSteps;
    const auto predictions = predict_all(bundle, table);

    std::vector<MetricsRow> rows;
    double total_ste = 0.0;
    for (std::size_t i = 0; i < table.streams.size(); ++i) {
        rows.push_back(score_row(table.names[i], table.streams[i], predictions[i], mode));
        total_ste += rows.back().ste_v;
    }
    append_summary_rows(rows, total_ste);

    // Baselines over the same data, pooled across streams.
    ConfusionCounts majority_counts;
    ConfusionCounts reactive_counts;
    double majority_ste = 0.0;
    double reactive_ste = 0.0;
    for (const auto& target : table.streams) {
        const auto [majority_pred, majority_acc] = majority_baseline(target);
        (void)majority_acc;
        majority_counts += confusion(target, majority_pred);
        majority_ste += ste_full(target, majority_pred, mode).total;
        const auto reactive_pred = reactive_baseline(target);
        reactive_counts += confusion(target, reactive_pred);
        reactive_ste += ste_full(target, reactive_pred, mode).total;
    }
    MetricsRow majority_row;
    majority_row.label = "majority";
    majority_row.counts = majority_counts;
    majority_row.precision_v = precision(majority_counts);
    majority_row.recall_v = recall(majority_counts);
    majority_row.f1_v = f1(majority_counts);
    majority_row.accuracy_v = accuracy(majority_counts);
    majority_row.ste_v = majority_ste;
    rows.push_back(majority_row);
    MetricsRow reactive_row;
    reactive_row.label = "reactive";
    reactive_row.counts = reactive_counts;
    reactive_row.precision_v = precision(reactive_counts);
    reactive_row.recall_v = recall(reactive_counts);
    reactive_row.f1_v = f1(reactive_counts);
    reactive_row.accuracy_v = accuracy(reactive_counts);
    reactive_row.ste_v = reactive_ste;
    rows.push_back(reactive_row);

    const std::string csv = metrics_csv(rows);
    if (out_dir.empty()) {
        std::cout << csv;
    } else {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "metrics.csv", csv);
        std::cout << "metrics " << (fs::path(out_dir) / "metrics.csv").string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// generate

int run_generate(const std::string& checkpoint_path, const DataOpts& data_opts, Step steps,
                 const std::string& mode, const std::string& out_dir, bool plot) {
    const auto bundle = load_checkpoint(read_file(checkpoint_path));
    const bool autoregressive = mode == "autoregressive";
    if (!autoregressive && mode != "teacher") {
        throw ConfigError("mode must be teacher or autoregressive");
    }

    std::optional<EventTable> table;
    if (!data_opts.path.empty()) {
        table = load_table(data_opts);
    }
    if (steps <= 0) {
        if (!table) {
            throw ConfigError("--steps is required when no data is given");
        }
        steps = table->horizon();
    }
    const bool needs_teacher = !autoregressive && bundle.nets.front().cfg.n_inputs > 0;
    if (needs_teacher && !table) {
        throw ConfigError("teacher mode needs --data for the input streams");
    }

    std::vector<EventStream> predictions;
    std::vector<std::string> names = bundle.stream_names;
    if (bundle.topology == Topology::Joint) {
        FreeRunOptions opts;
        opts.steps = steps;
        opts.autoregressive = autoregressive;
        auto run = free_run(bundle.nets[0], table ? &table->streams : nullptr, opts);
        predictions = std::move(run.outputs);
    } else {
        for (std::size_t i = 0; i < bundle.nets.size(); ++i) {
            std::vector<EventStream> teacher;
            if (table) {
                if (i >= table->streams.size()) {
                    throw DimensionMismatch("data has fewer streams than the checkpoint");
                }
                teacher.push_back(table->streams[i]);
            }
            FreeRunOptions opts;
            opts.steps = steps;
            opts.autoregressive = autoregressive;
            auto run = free_run(bundle.nets[i], table ? &teacher : nullptr, opts);
            predictions.push_back(std::move(run.outputs[0]));
        }
    }
    if (names.size() != predictions.size()) {
        names.clear();
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            names.push_back("stream" + std::to_string(i));
        }
    }

    EventTable out_table;
    out_table.names = names;
    out_table.streams = predictions;
    const std::string csv = save_event_csv(out_table);
    if (out_dir.empty()) {
        std::cout << csv;
    } else {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "predictions.csv", csv);
        std::cout << "predictions " << (fs::path(out_dir) / "predictions.csv").string() << "\n";
        if (plot && table) {
            write_file(fs::path(out_dir) / "raster.svg",
                       svg_raster(names, table->streams, predictions));
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// ste

int run_ste(const std::string& file_a, const std::string& file_b, bool onsets_only) {
    const auto a = load_event_csv(read_file(file_a), file_a);
    const auto b = load_event_csv(read_file(file_b), file_b);
    if (a.names != b.names) {
        throw DimensionMismatch("stream names differ between the two files");
    }
    const EventMode mode = onsets_only ? EventMode::OnsetsOnly : EventMode::AllOnSteps;
    std::string out = "stream,ste\n";
    double total = 0.0;
    for (std::size_t i = 0; i < a.streams.size(); ++i) {
        const double v = ste_full(a.streams[i], b.streams[i], mode).total;
        total += v;
        out += a.names[i] + "," + fmt(v) + "\n";
    }
    out += "total," + fmt(total) + "\n";
    std::cout << out;
    return 0;
}

// ---------------------------------------------------------------------------
// synth

int run_synth(const std::string& kind, Step interval, Step on_len, Step off_len, Step gap_short,
              Step gap_long, Step steps, std::string name, const std::string& out_file) {
    EventStream stream = EventStream::zeros(1);
    if (kind == "fixed") {
        stream = synth_fixed_interval(interval, steps);
        if (name.empty()) name = "fixed_" + std::to_string(interval);
    } else if (kind == "onoff") {
        stream = synth_on_off(on_len, off_len, steps);
        if (name.empty()) {
            name = "onoff_" + std::to_string(on_len) + "_" + std::to_string(off_len);
        }
    } else if (kind == "two-interval") {
        stream = synth_two_interval(on_len, gap_short, gap_long, steps);
        if (name.empty()) {
            name = "two_" + std::to_string(gap_short) + "_" + std::to_string(gap_long);
        }
    } else {
        throw ConfigError("unknown synth kind '" + kind + "'");
    }
    EventTable table;
    table.names = {name};
    table.streams = {stream};
    const std::string csv = save_event_csv(table);
    if (out_file.empty()) {
        std::cout << csv;
    } else {
        if (fs::path(out_file).has_parent_path()) {
            fs::create_directories(fs::path(out_file).parent_path());
        }
        write_file(out_file, csv);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// baseline

int run_baseline(const DataOpts& data_opts, const std::string& out_dir, bool onsets_only) {
    const EventTable table = load_table(data_opts);
    const EventMode mode = onsets_only ? EventMode::OnsetsOnly : EventMode::AllOnSteps;
    std::string out = "stream,baseline,tp,fp,fn,tn,precision,recall,f1,accuracy,ste\n";
    ConfusionCounts majority_total;
    ConfusionCounts reactive_total;
    double majority_ste = 0.0;
    double reactive_ste = 0.0;
    auto emit = [&](const std::string& stream, const std::string& label,
                    const ConfusionCounts& c, double ste) {
        out += stream + "," + label + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) +
               "," + std::to_string(c.fn) + "," + std::to_string(c.tn) + "," +
               fmt(precision(c)) + "," + fmt(recall(c)) + "," + fmt(f1(c)) + "," +
               fmt(accuracy(c)) + "," + fmt(ste) + "\n";
    };
    for (std::size_t i = 0; i < table.streams.size(); ++i) {
        const auto& target = table.streams[i];
        const auto [majority_pred, acc] = majority_baseline(target);
        (void)acc;
        const auto mc = confusion(target, majority_pred);
        const double ms = ste_full(target, majority_pred, mode).total;
        emit(table.names[i], "majority", mc, ms);
        majority_total += mc;
        majority_ste += ms;
        const auto reactive_pred = reactive_baseline(target);
        const auto rc = confusion(target, reactive_pred);
        const double rs = ste_full(target, reactive_pred, mode).total;
        emit(table.names[i], "reactive", rc, rs);
        reactive_total += rc;
        reactive_ste += rs;
    }
    emit("pooled", "majority", majority_total, majority_ste);
    emit("pooled", "reactive", reactive_total, reactive_ste);
    if (out_dir.empty()) {
        std::cout << out;
    } else {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "baselines.csv", out);
        std::cout << "baselines " << (fs::path(out_dir) / "baselines.csv").string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ltddm: online event-timing learning with drift-diffusion accumulators"};
    app.require_subcommand(1);

    int exit_code = 0;

    // train ------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train a model on event streams");
    auto train_merge = std::make_shared<ConfigMerge>();
    auto train_data = std::make_shared<DataOpts>();
    auto train_model = std::make_shared<ModelOpts>();
    auto train_out = std::make_shared<std::string>();
    auto train_seed = std::make_shared<std::int64_t>(0);
    auto train_workers = std::make_shared<std::int64_t>(1);
    auto train_plot = std::make_shared<bool>(false);
    auto train_config = std::make_shared<std::string>();
    add_data_options(train_cmd, *train_data, *train_merge, false);
    add_model_options(train_cmd, *train_model, *train_merge);
    train_merge->bind(train_cmd->add_option("--out", *train_out, "output directory")->required(),
                      "out", *train_out);
    train_merge->bind(train_cmd->add_option("--seed", *train_seed,
                                            "seed recorded with the run (reserved for "
                                            "randomized initialization)"),
                      "seed", *train_seed);
    train_merge->bind(train_cmd->add_option("--workers", *train_workers,
                                            "parallel workers for per-stream training"),
                      "workers", *train_workers);
    train_merge->bind(train_cmd->add_flag("--plot", *train_plot, "emit an SVG learning curve"),
                      "plot", *train_plot);
    train_cmd->add_option("--config", *train_config, "flat JSON config mirrored by the flags");
    train_cmd->callback([=, &exit_code] {
        train_merge->apply(*train_config);
        if (train_data->path.empty()) {
            throw ConfigError("--data is required");
        }
        exit_code = run_train(*train_data, *train_model, *train_out, *train_seed, *train_workers,
                              *train_plot);
    });

    // eval ---------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint against event streams");
    auto eval_merge = std::make_shared<ConfigMerge>();
    auto eval_data = std::make_shared<DataOpts>();
    auto eval_ckpt = std::make_shared<std::string>();
    auto eval_out = std::make_shared<std::string>();
    auto eval_onsets = std::make_shared<bool>(false);
    auto eval_config = std::make_shared<std::string>();
    add_data_options(eval_cmd, *eval_data, *eval_merge, false);
    eval_merge->bind(
        eval_cmd->add_option("--checkpoint", *eval_ckpt, "checkpoint file")->required(),
        "checkpoint", *eval_ckpt);
    eval_merge->bind(eval_cmd->add_option("--out", *eval_out, "output directory"), "out",
                     *eval_out);
    eval_merge->bind(eval_cmd->add_flag("--onsets-only", *eval_onsets,
                                        "score timing error on block onsets only"),
                     "onsets-only", *eval_onsets);
    eval_cmd->add_option("--config", *eval_config, "flat JSON config mirrored by the flags");
    eval_cmd->callback([=, &exit_code] {
        eval_merge->apply(*eval_config);
        if (eval_data->path.empty()) {
            throw ConfigError("--data is required");
        }
        exit_code = run_eval(*eval_ckpt, *eval_data, *eval_out, *eval_onsets);
    });

    // generate -----------------------------------------------------------
    auto* gen_cmd = app.add_subcommand("generate", "emit predictions from a checkpoint");
    auto gen_merge = std::make_shared<ConfigMerge>();
    auto gen_data = std::make_shared<DataOpts>();
    auto gen_ckpt = std::make_shared<std::string>();
    auto gen_steps = std::make_shared<std::int64_t>(0);
    auto gen_mode = std::make_shared<std::string>("teacher");
    auto gen_out = std::make_shared<std::string>();
    auto gen_plot = std::make_shared<bool>(false);
    auto gen_config = std::make_shared<std::string>();
    add_data_options(gen_cmd, *gen_data, *gen_merge, false);
    gen_merge->bind(gen_cmd->add_option("--checkpoint", *gen_ckpt, "checkpoint file")->required(),
                    "checkpoint", *gen_ckpt);
    gen_merge->bind(gen_cmd->add_option("--steps", *gen_steps, "steps to generate"), "steps",
                    *gen_steps);
    gen_merge->bind(gen_cmd->add_option("--mode", *gen_mode, "teacher | autoregressive"), "mode",
                    *gen_mode);
    gen_merge->bind(gen_cmd->add_option("--out", *gen_out, "output directory"), "out", *gen_out);
    gen_merge->bind(gen_cmd->add_flag("--plot", *gen_plot, "emit a raster SVG (needs --data)"),
                    "plot", *gen_plot);
    gen_cmd->add_option("--config", *gen_config, "flat JSON config mirrored by the flags");
    gen_cmd->callback([=, &exit_code] {
        gen_merge->apply(*gen_config);
        exit_code = run_generate(*gen_ckpt, *gen_data, *gen_steps, *gen_mode, *gen_out, *gen_plot);
    });

    // ste ------------------------------------------------------------------
    auto* ste_cmd = app.add_subcommand("ste", "squared timing error between two event files");
    auto ste_a = std::make_shared<std::string>();
    auto ste_b = std::make_shared<std::string>();
    auto ste_onsets = std::make_shared<bool>(false);
    ste_cmd->add_option("fileA", *ste_a, "first event CSV")->required();
    ste_cmd->add_option("fileB", *ste_b, "second event CSV")->required();
    ste_cmd->add_flag("--onsets-only", *ste_onsets, "score block onsets only");
    ste_cmd->callback(
        [=, &exit_code] { exit_code = run_ste(*ste_a, *ste_b, *ste_onsets); });

    // synth ------------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic target stream");
    auto synth_kind = std::make_shared<std::string>("fixed");
    auto synth_interval = std::make_shared<std::int64_t>(10);
    auto synth_on = std::make_shared<std::int64_t>(1);
    auto synth_off = std::make_shared<std::int64_t>(8);
    auto synth_gap_s = std::make_shared<std::int64_t>(3);
    auto synth_gap_l = std::make_shared<std::int64_t>(8);
    auto synth_steps = std::make_shared<std::int64_t>(200);
    auto synth_name = std::make_shared<std::string>();
    auto synth_out = std::make_shared<std::string>();
    synth_cmd->add_option("--kind", *synth_kind, "fixed | onoff | two-interval");
    synth_cmd->add_option("--interval", *synth_interval, "fixed: steps between events");
    synth_cmd->add_option("--on", *synth_on, "onoff/two-interval: ON run length");
    synth_cmd->add_option("--off", *synth_off, "onoff: OFF run length");
    synth_cmd->add_option("--gap-short", *synth_gap_s, "two-interval: short gap");
    synth_cmd->add_option("--gap-long", *synth_gap_l, "two-interval: long gap");
    synth_cmd->add_option("--steps,-T", *synth_steps, "total steps");
    synth_cmd->add_option("--name", *synth_name, "stream name");
    synth_cmd->add_option("--out", *synth_out, "output CSV path (stdout when omitted)");
    synth_cmd->callback([=, &exit_code] {
        exit_code = run_synth(*synth_kind, *synth_interval, *synth_on, *synth_off, *synth_gap_s,
                              *synth_gap_l, *synth_steps, *synth_name, *synth_out);
    });

    // baseline ------------------------------------------------------------
    auto* base_cmd = app.add_subcommand("baseline", "score majority and reactive baselines");
    auto base_merge = std::make_shared<ConfigMerge>();
    auto base_data = std::make_shared<DataOpts>();
    auto base_out = std::make_shared<std::string>();
    auto base_onsets = std::make_shared<bool>(false);
    auto base_config = std::make_shared<std::string>();
    add_data_options(base_cmd, *base_data, *base_merge, true);
    base_merge->bind(base_cmd->add_option("--out", *base_out, "output directory"), "out",
                     *base_out);
    base_merge->bind(base_cmd->add_flag("--onsets-only", *base_onsets,
                                        "score timing error on block onsets only"),
                     "onsets-only", *base_onsets);
    base_cmd->add_option("--config", *base_config, "flat JSON config mirrored by the flags");
    base_cmd->callback([=, &exit_code] {
        base_merge->apply(*base_config);
        exit_code = run_baseline(*base_data, *base_out, *base_onsets);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
