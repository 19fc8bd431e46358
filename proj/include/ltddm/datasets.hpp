#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltddm/errors.hpp"
#include "ltddm/event_stream.hpp"

namespace ltddm {

/// Named, equal-length event streams from one source.
struct EventTable {
    std::vector<std::string> names;
    std::vector<EventStream> streams;
    std::string meta;

    Step horizon() const { return streams.empty() ? 0 : streams.front().size(); }
};

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.emplace_back(line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    // Drop a trailing empty line from a final newline.
    if (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    return lines;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    for (auto& c : cells) {
        while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.erase(c.begin());
        while (!c.empty() && (c.back() == ' ' || c.back() == '\t')) c.pop_back();
    }
    return cells;
}

inline double parse_double(const std::string& cell, std::size_t line, std::size_t col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + cell + "'", line, col);
    }
}

}  // namespace detail

/// Header of stream names followed by rows of 0/1 cells, one row per step.
inline EventTable load_event_csv(std::string_view text, std::string meta = "") {
    const auto lines = detail::split_lines(text);
    if (lines.empty() || lines[0].empty()) {
        throw ParseError("event CSV needs a header of stream names", 1);
    }
    const auto names = detail::split_csv_row(lines[0]);
    if (lines.size() < 2) {
        throw ParseError("event CSV has no data rows", 1);
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            if (names[i] == names[j]) {
                throw ParseError("duplicate stream name '" + names[i] + "'", 1, j + 1);
            }
        }
    }
    std::vector<std::vector<std::uint8_t>> columns(names.size());
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = detail::split_csv_row(lines[r]);
        if (cells.size() != names.size()) {
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(names.size()),
                             r + 1);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c] == "0") {
                columns[c].push_back(0);
            } else if (cells[c] == "1") {
                columns[c].push_back(1);
            } else {
                throw ParseError("expected 0 or 1, got '" + cells[c] + "'", r + 1, c + 1);
            }
        }
    }
    EventTable table;
    table.names = names;
    table.meta = std::move(meta);
    for (auto& col : columns) {
        table.streams.emplace_back(std::move(col));
    }
    return table;
}

inline std::string save_event_csv(const EventTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.names.size(); ++i) {
        if (i) out += ',';
        out += table.names[i];
    }
    out += '\n';
    const Step T = table.horizon();
    for (Step t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < table.streams.size(); ++i) {
            if (i) out += ',';
            out += table.streams[i].on(t) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

/// Binarize a sampled signal: an event at each strict local maximum with
/// value >= threshold. Maxima closer than `min_separation` keep the larger
/// (ties keep the earlier).
inline EventStream detect_peaks(std::span<const double> signal, double threshold = 0.5,
                                Step min_separation = 1) {
    std::vector<Step> peaks;
    for (std::size_t i = 1; i + 1 < signal.size(); ++i) {
        if (signal[i] >= threshold && signal[i] > signal[i - 1] && signal[i] > signal[i + 1]) {
            peaks.push_back(static_cast<Step>(i));
        }
    }
    std::vector<Step> kept;
    std::vector<double> kept_value;
    for (Step p : peaks) {
        const double v = signal[static_cast<std::size_t>(p)];
        bool drop = false;
        while (!kept.empty() && p - kept.back() < min_separation) {
            if (v > kept_value.back()) {
                kept.pop_back();
                kept_value.pop_back();
            } else {
                drop = true;  // earlier peak wins ties and larger values
                break;
            }
        }
        if (!drop) {
            kept.push_back(p);
            kept_value.push_back(v);
        }
    }
    std::vector<std::uint8_t> states(signal.size(), 0);
    for (Step p : kept) {
        states[static_cast<std::size_t>(p)] = 1;
    }
    return EventStream(std::move(states));
}

/// A tone with its duration in 32nd-note steps. Tones index 8 octaves of 12
/// semitones; nullopt marks a rest.
struct NoteEvent {
    std::optional<int> tone_index;
    std::int64_t duration = 1;
};

namespace detail {

inline int kern_pitch_class(char letter) {
    switch (letter) {
        case 'c': return 0;
        case 'd': return 2;
        case 'e': return 4;
        case 'f': return 5;
        case 'g': return 7;
        case 'a': return 9;
        case 'b': return 11;
        default: return -1;
    }
}

inline NoteEvent parse_kern_token(const std::string& token, std::size_t line_no) {
    if (token.find(' ') != std::string::npos) {
        throw UnsupportedToken("chords are outside the supported subset", line_no);
    }
    for (char c : token) {
        if (c == '[' || c == ']' || c == '_' || c == '{' || c == '}' || c == '(' || c == ')' ||
            c == 'q') {
            throw UnsupportedToken("ties, slurs and grace notes are outside the supported subset",
                                   line_no);
        }
    }
    std::size_t i = 0;
    std::int64_t code = 0;
    while (i < token.size() && token[i] >= '0' && token[i] <= '9') {
        code = code * 10 + (token[i] - '0');
        ++i;
    }
    if (code == 0) {
        throw ParseError("kern token lacks a duration code: '" + token + "'", line_no);
    }
    static constexpr std::array<std::int64_t, 6> kCodes{1, 2, 4, 8, 16, 32};
    if (std::find(kCodes.begin(), kCodes.end(), code) == kCodes.end()) {
        throw UnsupportedToken("duration code " + std::to_string(code) + " is unsupported",
                               line_no);
    }
    std::int64_t steps = 32 / code;
    if (i < token.size() && token[i] == '.') {
        if (steps % 2 != 0) {
            throw UnsupportedToken("dotted 32nd notes do not fit the step grid", line_no);
        }
        steps += steps / 2;
        ++i;
    }
    if (i >= token.size()) {
        throw ParseError("kern token lacks a pitch: '" + token + "'", line_no);
    }
    if (token[i] == 'r') {
        if (i + 1 != token.size()) {
            throw UnsupportedToken("unexpected characters after rest: '" + token + "'", line_no);
        }
        return NoteEvent{std::nullopt, steps};
    }
    const char first = token[i];
    const bool lower = first >= 'a' && first <= 'z';
    const char base = lower ? first : static_cast<char>(first - 'A' + 'a');
    const int pc = kern_pitch_class(base);
    if (pc < 0) {
        throw ParseError("unknown pitch letter in '" + token + "'", line_no);
    }
    int repeat = 0;
    while (i < token.size() && token[i] == first) {
        ++repeat;
        ++i;
    }
    int semitone = pc;
    if (i < token.size() && (token[i] == '#' || token[i] == '-')) {
        semitone += token[i] == '#' ? 1 : -1;
        ++i;
    }
    if (i != token.size()) {
        throw UnsupportedToken("unexpected characters in kern token '" + token + "'", line_no);
    }
    // "c" is octave 4, doubling rises; "C" is octave 3, doubling falls.
    const int octave = lower ? 3 + repeat : 4 - repeat;
    const int tone = octave * 12 + semitone;
    if (tone < 0 || tone > 96) {
        throw ParseError("tone index " + std::to_string(tone) + " outside 0..96", line_no);
    }
    return NoteEvent{tone, steps};
}

inline NoteEvent parse_note_list_line(const std::string& line, std::size_t line_no) {
    std::string tone_text;
    std::string dur_text;
    const std::size_t sep = line.find_first_of(", \t");
    if (sep == std::string::npos) {
        throw ParseError("expected 'tone,duration'", line_no);
    }
    tone_text = line.substr(0, sep);
    dur_text = line.substr(sep + 1);
    while (!dur_text.empty() && (dur_text.front() == ' ' || dur_text.front() == ',' ||
                                 dur_text.front() == '\t')) {
        dur_text.erase(dur_text.begin());
    }
    std::int64_t duration = 0;
    auto [p, ec] = std::from_chars(dur_text.data(), dur_text.data() + dur_text.size(), duration);
    if (ec != std::errc{} || p != dur_text.data() + dur_text.size() || duration < 1) {
        throw ParseError("bad duration '" + dur_text + "'", line_no);
    }
    if (tone_text == "r" || tone_text == "R") {
        return NoteEvent{std::nullopt, duration};
    }
    int tone = 0;
    auto [p2, ec2] =
        std::from_chars(tone_text.data(), tone_text.data() + tone_text.size(), tone);
    if (ec2 != std::errc{} || p2 != tone_text.data() + tone_text.size()) {
        throw ParseError("bad tone index '" + tone_text + "'", line_no);
    }
    if (tone < 0 || tone > 96) {
        throw ParseError("tone index " + std::to_string(tone) + " outside 0..96", line_no);
    }
    return NoteEvent{tone, duration};
}

}  // namespace detail

/// Parse a monophonic score into 12 folded tone streams at 32nd-note
/// resolution. Accepts either a line-oriented "tone,duration" note list or
/// a single **kern spine restricted to single notes and rests with the
/// standard duration codes. Streams that never sound get one event on the
/// final step so every stream has at least one.
inline EventTable parse_kern_subset(std::string_view text) {
    const auto lines = detail::split_lines(text);
    const bool kern_mode = text.find("**kern") != std::string_view::npos;
    std::vector<NoteEvent> notes;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        if (kern_mode) {
            if (line[0] == '!' || line[0] == '*' || line[0] == '=') continue;
            if (line.find('\t') != std::string::npos) {
                throw UnsupportedToken("multiple spines are outside the supported subset", i + 1);
            }
            notes.push_back(detail::parse_kern_token(line, i + 1));
        } else {
            if (line[0] == '#') continue;
            notes.push_back(detail::parse_note_list_line(line, i + 1));
        }
    }
    if (notes.empty()) {
        throw ParseError("no notes found", lines.empty() ? 1 : lines.size());
    }
    Step total = 0;
    for (const auto& n : notes) total += n.duration;
    std::vector<std::vector<std::uint8_t>> columns(
        12, std::vector<std::uint8_t>(static_cast<std::size_t>(total), 0));
    Step clock = 0;
    for (const auto& n : notes) {
        if (n.tone_index) {
            auto& col = columns[static_cast<std::size_t>(*n.tone_index % 12)];
            for (Step t = clock; t < clock + n.duration; ++t) {
                col[static_cast<std::size_t>(t)] = 1;
            }
        }
        clock += n.duration;
    }
    EventTable table;
    table.meta = kern_mode ? "kern" : "note-list";
    for (int tone = 0; tone < 12; ++tone) {
        auto& col = columns[static_cast<std::size_t>(tone)];
        if (std::find(col.begin(), col.end(), std::uint8_t{1}) == col.end()) {
            col.back() = 1;  // silent streams end with a single event
        }
        table.names.push_back("tone" + std::to_string(tone));
        table.streams.emplace_back(std::move(col));
    }
    return table;
}

/// Mark days whose price is at least z population standard deviations above
/// the mean of the previous `window` closes. The first `window` days are
/// OFF; a zero-variance window marks a day only when the price strictly
/// exceeds the mean.
inline EventStream discretize_prices(std::span<const double> prices, std::size_t window = 14,
                                     double z = 0.7) {
    if (prices.size() < window + 1) {
        throw InsufficientHistory("need at least " + std::to_string(window + 1) +
                                  " prices, got " + std::to_string(prices.size()));
    }
    std::vector<std::uint8_t> states(prices.size(), 0);
    for (std::size_t t = window; t < prices.size(); ++t) {
        double mean = 0.0;
        for (std::size_t i = t - window; i < t; ++i) mean += prices[i];
        mean /= static_cast<double>(window);
        double var = 0.0;
        for (std::size_t i = t - window; i < t; ++i) {
            const double d = prices[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(window);
        const double sd = std::sqrt(var);
        const bool event = sd == 0.0 ? prices[t] > mean : prices[t] >= mean + z * sd;
        states[t] = event ? 1 : 0;
    }
    return EventStream(std::move(states));
}

/// Price CSV: a date column followed by one close column per instrument.
struct PriceTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> closes;
};

inline PriceTable load_price_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.size() < 2) {
        throw ParseError("price CSV needs a header and data rows", 1);
    }
    const auto header = detail::split_csv_row(lines[0]);
    if (header.size() < 2) {
        throw ParseError("price CSV needs a date column and at least one close column", 1);
    }
    PriceTable table;
    table.names.assign(header.begin() + 1, header.end());
    table.closes.assign(table.names.size(), {});
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = detail::split_csv_row(lines[r]);
        if (cells.size() != header.size()) {
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header.size()),
                             r + 1);
        }
        for (std::size_t c = 1; c < cells.size(); ++c) {
            table.closes[c - 1].push_back(detail::parse_double(cells[c], r + 1, c + 1));
        }
    }
    return table;
}

/// Signal CSV: a header of stream names and rows of samples.
struct SignalTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> samples;
};

inline SignalTable load_signal_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.size() < 2) {
        throw ParseError("signal CSV needs a header and data rows", 1);
    }
    const auto header = detail::split_csv_row(lines[0]);
    SignalTable table;
    table.names = header;
    table.samples.assign(header.size(), {});
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = detail::split_csv_row(lines[r]);
        if (cells.size() != header.size()) {
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header.size()),
                             r + 1);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            table.samples[c].push_back(detail::parse_double(cells[c], r + 1, c + 1));
        }
    }
    return table;
}

/// Single-step events every `interval` steps; the first falls on step
/// interval - 1.
inline EventStream synth_fixed_interval(Step interval, Step total) {
    if (interval < 1 || interval >= total) {
        throw InvalidPeriod("interval must satisfy 1 <= interval < total");
    }
    std::vector<std::uint8_t> states(static_cast<std::size_t>(total), 0);
    for (Step t = interval - 1; t < total; t += interval) {
        states[static_cast<std::size_t>(t)] = 1;
    }
    return EventStream(std::move(states));
}

/// Repeating OFF run of `off_len` followed by an ON run of `on_len`.
inline EventStream synth_on_off(Step on_len, Step off_len, Step total) {
    if (on_len < 1 || off_len < 1 || on_len + off_len >= total) {
        throw InvalidPeriod("on/off lengths must be >= 1 and the period must fit the horizon");
    }
    std::vector<std::uint8_t> states(static_cast<std::size_t>(total), 0);
    const Step period = on_len + off_len;
    for (Step t = 0; t < total; ++t) {
        states[static_cast<std::size_t>(t)] = (t % period) >= off_len ? 1 : 0;
    }
    return EventStream(std::move(states));
}

/// Events of duration `on_len` separated by alternating long and short
/// gaps, starting with the long gap.
inline EventStream synth_two_interval(Step on_len, Step gap_short, Step gap_long, Step total) {
    if (on_len < 1 || gap_short < 1 || gap_long < 1 ||
        2 * on_len + gap_short + gap_long >= total) {
        throw InvalidPeriod("two-interval parameters must be >= 1 and the period must fit");
    }
    std::vector<std::uint8_t> states(static_cast<std::size_t>(total), 0);
    Step t = gap_long;
    bool short_next = true;
    while (t < total) {
        for (Step i = 0; i < on_len && t < total; ++i, ++t) {
            states[static_cast<std::size_t>(t)] = 1;
        }
        t += short_next ? gap_short : gap_long;
        short_next = !short_next;
    }
    return EventStream(std::move(states));
}

}  // namespace ltddm
