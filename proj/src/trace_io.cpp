#include "tlsbath/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tlsbath/errors.hpp"
#include "tlsbath/units.hpp"

namespace tlsbath {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view text, double& value) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size();
}

struct Header {
    double time_scale = 1.0;
    bool has_std = false;
};

std::optional<Header> parse_header(std::string_view line) {
    const auto cols = split(line);
    if (cols.size() < 2 || cols.size() > 3) return std::nullopt;
    Header h;
    if (cols[0] == "time_s") {
        h.time_scale = 1.0;
    } else if (cols[0] == "time_ms") {
        h.time_scale = 1e-3;
    } else if (cols[0] == "time_us") {
        h.time_scale = 1e-6;
    } else if (cols[0] == "time_ns") {
        h.time_scale = 1e-9;
    } else {
        return std::nullopt;
    }
    if (cols[1] != "population") return std::nullopt;
    if (cols.size() == 3) {
        if (cols[2] != "population_std") return std::nullopt;
        h.has_std = true;
    }
    return h;
}

struct Metadata {
    std::optional<double> omega;
    std::string probe_state;
    std::string sequence_id;
};

void apply_metadata(std::string_view comment, Metadata& meta, std::size_t line) {
    const std::size_t eq = comment.find('=');
    if (eq == std::string_view::npos) return;
    const auto key = trim(comment.substr(0, eq));
    const auto value = trim(comment.substr(eq + 1));
    if (key == "frequency_hz") {
        double f = 0.0;
        if (!parse_double(value, f) || !std::isfinite(f)) {
            throw ParseError(line, "frequency_hz is not a finite number");
        }
        meta.omega = units::angular(f);
    } else if (key == "probe_state") {
        if (value != "g" && value != "e" && !value.empty()) {
            throw ParseError(line, "probe_state must be g or e");
        }
        meta.probe_state = std::string(value);
    } else if (key == "sequence_id") {
        meta.sequence_id = std::string(value);
    }
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

void write_traces_csv(std::ostream& out, std::span<const DecayTrace> traces) {
    bool first = true;
    for (const DecayTrace& t : traces) {
        t.validate();
        if (!first) out << '\n';
        first = false;
        if (t.omega) out << "# frequency_hz=" << format_double(units::to_hz(*t.omega)) << '\n';
        if (!t.probe_state.empty()) out << "# probe_state=" << t.probe_state << '\n';
        if (!t.sequence_id.empty()) out << "# sequence_id=" << t.sequence_id << '\n';
        const bool with_std = !t.p_q_std.empty();
        out << (with_std ? "time_s,population,population_std\n" : "time_s,population\n");
        for (std::size_t i = 0; i < t.size(); ++i) {
            out << format_double(t.times[i]) << ',' << format_double(t.p_q[i]);
            if (with_std) out << ',' << format_double(t.p_q_std[i]);
            out << '\n';
        }
    }
}

std::string traces_to_csv(std::span<const DecayTrace> traces) {
    std::ostringstream os;
    write_traces_csv(os, traces);
    return os.str();
}

void write_traces_json(std::ostream& out, std::span<const DecayTrace> traces) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const DecayTrace& t : traces) {
        t.validate();
        nlohmann::ordered_json j;
        j["frequency_hz"] = t.omega ? nlohmann::ordered_json(units::to_hz(*t.omega)) : nlohmann::ordered_json();
        j["probe_state"] = t.probe_state;
        j["sequence_id"] = t.sequence_id;
        j["time_s"] = t.times;
        j["population"] = t.p_q;
        if (!t.p_q_std.empty()) j["population_std"] = t.p_q_std;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

TraceBundle read_traces_csv(std::istream& in, Provenance provenance) {
    TraceBundle bundle;
    bundle.provenance = provenance;
    Metadata pending;
    std::optional<Header> header;
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (header) {
                // A comment after data starts the metadata of the next block.
                header.reset();
                pending = {};
            }
            apply_metadata(line.substr(1), pending, line_no);
            continue;
        }
        if (line.rfind("time_", 0) == 0) {
            header = parse_header(line);
            if (!header) throw ParseError(line_no, "unrecognised header '" + std::string(line) + "'");
            DecayTrace t;
            t.omega = pending.omega;
            t.probe_state = pending.probe_state;
            t.sequence_id = pending.sequence_id;
            bundle.traces.push_back(std::move(t));
            pending = {};
            continue;
        }
        if (!header) throw ParseError(line_no, "data row before a time_s,population header");

        const auto cols = split(line);
        const std::size_t expected = header->has_std ? 3 : 2;
        if (cols.size() != expected) {
            throw ParseError(line_no, "expected " + std::to_string(expected) + " columns, found " +
                                          std::to_string(cols.size()));
        }
        std::array<double, 3> v{};
        for (std::size_t c = 0; c < expected; ++c) {
            if (!parse_double(cols[c], v[c])) {
                throw ParseError(line_no, "'" + std::string(cols[c]) + "' is not a number");
            }
            if (!std::isfinite(v[c])) throw ParseError(line_no, "non-finite value");
        }
        DecayTrace& t = bundle.traces.back();
        const double time = v[0] * header->time_scale;
        if (time < 0.0) throw ParseError(line_no, "negative time");
        if (!t.times.empty() && !(time > t.times.back())) {
            throw ParseError(line_no, "times must be strictly increasing");
        }
        if (header->has_std && v[2] < 0.0) throw ParseError(line_no, "negative population_std");
        t.times.push_back(time);
        t.p_q.push_back(v[1]);
        if (header->has_std) t.p_q_std.push_back(v[2]);
    }
    if (bundle.traces.empty()) throw ParseError(0, "no trace found");
    for (std::size_t i = 0; i < bundle.traces.size(); ++i) {
        if (bundle.traces[i].times.empty()) {
            throw ParseError(0, "trace " + std::to_string(i + 1) + " has no samples");
        }
    }
    return bundle;
}

TraceBundle ingest_traces(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file '" + path.string() + "'");
    return read_traces_csv(in, Provenance::ingested);
}

}  // namespace tlsbath
