#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ltddm/errors.hpp"
#include "ltddm/network.hpp"

namespace ltddm {

/// A trained model plus the settings needed to rebuild and rerun it: one
/// network per stream for the per-stream topology, a single network
/// otherwise.
struct ModelBundle {
    ModelKind kind = ModelKind::Ltddm;
    Topology topology = Topology::PerStream;
    double eta = 0.1;
    std::int64_t epochs = 200;
    std::int64_t seed = 0;
    std::vector<std::string> stream_names;
    std::vector<LtddmNetwork> nets;
};

namespace detail {

/// Shortest decimal form that round-trips exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

inline double parse_checkpoint_double(const std::string& token, std::size_t line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size()) {
        throw CheckpointError("bad number '" + token + "' on line " + std::to_string(line));
    }
    return v;
}

inline std::int64_t parse_checkpoint_int(const std::string& token, std::size_t line) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size()) {
        throw CheckpointError("bad integer '" + token + "' on line " + std::to_string(line));
    }
    return v;
}

inline void write_unit_weights(std::string& out, const char* layer, std::int64_t index,
                               const BistableUnit& unit) {
    for (BankId id : {BankId::OnTrigger, BankId::OffTrigger}) {
        out += "unit ";
        out += layer;
        out += ' ';
        out += std::to_string(index);
        out += ' ';
        out += to_string(id);
        for (double w : unit.bank(id).w.w) {
            out += ' ';
            out += format_double(w);
        }
        out += '\n';
    }
}

}  // namespace detail

inline std::string save_checkpoint(const ModelBundle& bundle) {
    std::string out;
    out += "ltddm checkpoint v1\n";
    out += std::string("kind ") + (bundle.kind == ModelKind::Tddm ? "tddm" : "ltddm") + "\n";
    out += std::string("topology ") +
           (bundle.topology == Topology::PerStream ? "per-stream" : "joint") + "\n";
    out += "eta " + detail::format_double(bundle.eta) + "\n";
    out += "epochs " + std::to_string(bundle.epochs) + "\n";
    out += "seed " + std::to_string(bundle.seed) + "\n";
    out += "wiring bias,inputs,hidden\n";
    out += "streams " + std::to_string(bundle.stream_names.size()) + "\n";
    for (const auto& name : bundle.stream_names) {
        out += "stream " + name + "\n";
    }
    out += "nets " + std::to_string(bundle.nets.size()) + "\n";
    for (std::size_t k = 0; k < bundle.nets.size(); ++k) {
        const LtddmNetwork& net = bundle.nets[k];
        out += "net " + std::to_string(k) + " inputs " + std::to_string(net.cfg.n_inputs) +
               " hidden " + std::to_string(net.cfg.n_hidden) + " outputs " +
               std::to_string(net.cfg.n_outputs) + " horizon " +
               std::to_string(net.cfg.horizon) + " tau " + detail::format_double(net.cfg.tau) +
               "\n";
        for (std::size_t h = 0; h < net.hidden.size(); ++h) {
            detail::write_unit_weights(out, "hidden", static_cast<std::int64_t>(h),
                                       net.hidden[h]);
        }
        for (std::size_t o = 0; o < net.outputs.size(); ++o) {
            detail::write_unit_weights(out, "output", static_cast<std::int64_t>(o),
                                       net.outputs[o]);
        }
    }
    out += "end\n";
    return out;
}

inline ModelBundle load_checkpoint(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    if (!next_line() || line != "ltddm checkpoint v1") {
        throw CheckpointError("not a v1 checkpoint file");
    }
    ModelBundle bundle;
    std::vector<std::string> tokens;
    auto tokenize = [&]() {
        tokens.clear();
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    };
    LtddmNetwork* current = nullptr;
    std::int64_t expected_nets = -1;
    while (next_line()) {
        tokenize();
        const std::string& key = tokens[0];
        if (key == "kind") {
            if (tokens.size() != 2 || (tokens[1] != "tddm" && tokens[1] != "ltddm")) {
                throw CheckpointError("bad kind on line " + std::to_string(line_no));
            }
            bundle.kind = tokens[1] == "tddm" ? ModelKind::Tddm : ModelKind::Ltddm;
        } else if (key == "topology") {
            if (tokens.size() != 2 || (tokens[1] != "per-stream" && tokens[1] != "joint")) {
                throw CheckpointError("bad topology on line " + std::to_string(line_no));
            }
            bundle.topology =
                tokens[1] == "per-stream" ? Topology::PerStream : Topology::Joint;
        } else if (key == "eta") {
            bundle.eta = detail::parse_checkpoint_double(tokens.at(1), line_no);
        } else if (key == "epochs") {
            bundle.epochs = detail::parse_checkpoint_int(tokens.at(1), line_no);
        } else if (key == "seed") {
            bundle.seed = detail::parse_checkpoint_int(tokens.at(1), line_no);
        } else if (key == "wiring" || key == "streams") {
            // self-describing; counts are validated via the stream lines
        } else if (key == "stream") {
            const std::size_t pos = line.find(' ');
            bundle.stream_names.push_back(line.substr(pos + 1));
        } else if (key == "nets") {
            expected_nets = detail::parse_checkpoint_int(tokens.at(1), line_no);
        } else if (key == "net") {
            if (tokens.size() != 12) {
                throw CheckpointError("bad net header on line " + std::to_string(line_no));
            }
            NetworkConfig cfg;
            cfg.kind = bundle.kind;
            cfg.topology = bundle.topology;
            cfg.eta = bundle.eta;
            cfg.epochs = bundle.epochs;
            cfg.n_inputs = detail::parse_checkpoint_int(tokens[3], line_no);
            cfg.n_hidden = detail::parse_checkpoint_int(tokens[5], line_no);
            cfg.n_outputs = detail::parse_checkpoint_int(tokens[7], line_no);
            cfg.horizon = detail::parse_checkpoint_int(tokens[9], line_no);
            cfg.tau = detail::parse_checkpoint_double(tokens[11], line_no);
            bundle.nets.push_back(LtddmNetwork::build(cfg));
            current = &bundle.nets.back();
        } else if (key == "unit") {
            if (!current || tokens.size() < 4) {
                throw CheckpointError("unit line outside a net on line " + std::to_string(line_no));
            }
            const std::string& layer = tokens[1];
            const std::int64_t index = detail::parse_checkpoint_int(tokens[2], line_no);
            const std::string& bank_name = tokens[3];
            auto& units = layer == "hidden" ? current->hidden : current->outputs;
            if (index < 0 || index >= static_cast<std::int64_t>(units.size())) {
                throw CheckpointError("unit index out of range on line " + std::to_string(line_no));
            }
            const BankId id = bank_name == "on_trigger" ? BankId::OnTrigger : BankId::OffTrigger;
            TddmUnit& bank = units[static_cast<std::size_t>(index)].bank(id);
            if (tokens.size() - 4 != bank.w.size()) {
                throw CheckpointError("weight count mismatch on line " + std::to_string(line_no));
            }
            std::vector<double> w;
            for (std::size_t i = 4; i < tokens.size(); ++i) {
                w.push_back(detail::parse_checkpoint_double(tokens[i], line_no));
            }
            bank.w = DriftRates(std::move(w));
        } else if (key == "end") {
            if (expected_nets >= 0 &&
                expected_nets != static_cast<std::int64_t>(bundle.nets.size())) {
                throw CheckpointError("checkpoint declares " + std::to_string(expected_nets) +
                                      " nets but contains " +
                                      std::to_string(bundle.nets.size()));
            }
            return bundle;
        } else {
            throw CheckpointError("unknown checkpoint key '" + key + "' on line " +
                                  std::to_string(line_no));
        }
    }
    throw CheckpointError("checkpoint is missing its end marker");
}

}  // namespace ltddm
