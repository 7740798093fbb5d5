#pragma once

// Trace files. CSV layout, one block per trace:
//
//   # frequency_hz=6280000000
//   # probe_state=e
//   # sequence_id=holeburn
//   time_s,population[,population_std]
//   0,0.972
//   ...
//
// `#` lines before a header are metadata for the block that follows; other
// comment lines are ignored, as are blank lines. time_ms, time_us and time_ns
// headers are accepted and converted to seconds.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "tlsbath/dynamics.hpp"
#include "tlsbath/fitting.hpp"

namespace tlsbath {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

void write_traces_csv(std::ostream& out, std::span<const DecayTrace> traces);
std::string traces_to_csv(std::span<const DecayTrace> traces);

/// JSON array of {frequency_hz, probe_state, sequence_id, time_s, population,
/// population_std}.
void write_traces_json(std::ostream& out, std::span<const DecayTrace> traces);

/// Throws ParseError (with the 1-based line) on any schema violation,
/// including an input with no trace at all.
TraceBundle read_traces_csv(std::istream& in, Provenance provenance = Provenance::ingested);

/// Reads a CSV trace file. Throws ParseError, or std::runtime_error if the
/// file cannot be opened.
TraceBundle ingest_traces(const std::filesystem::path& path);

}  // namespace tlsbath
