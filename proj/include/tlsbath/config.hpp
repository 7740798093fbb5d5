#pragma once

// Run configuration. The document is YAML (JSON is accepted as the same
// schema). Every physical value is a string with a unit suffix, for example
// "6.28 GHz", "34 us" or "20 /MHz"; a bare number for such a field is a
// ConfigError. Quantities keep the number and unit as written so a
// parse -> serialize -> parse cycle is exact.
//
//   seed: 7
//   qubit:
//     frequency: 6.28 GHz
//     intrinsic_decay: 5 kHz        # a frequency (Gamma/2pi) or a lifetime
//     p_th: 0.028
//     readout: {frequency: 7.1 GHz, kappa: 2 MHz, coupling: 48 MHz}
//   bath:
//     tls: [{frequency: 6.28 GHz, coupling: 50 kHz, decay: 34 us, count: 100}]
//     combs: [{anchor: 6.28 GHz, spacing: 50 kHz, half_width: 200,
//              coupling: 50 kHz, decay: 34 us}]
//     long_lived: {fraction: 0.2, decay: 0.64 ms}
//     range: {min: 6 GHz, max: 6.5 GHz}
//   sequence: {...}    simulate: {...}    fit: {...}
//   map: {...}         freq_model: {...}

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlsbath/fitting.hpp"
#include "tlsbath/model.hpp"
#include "tlsbath/regimes.hpp"
#include "tlsbath/sequence.hpp"
#include "tlsbath/units.hpp"

namespace tlsbath {

struct Quantity {
    double value = 0.0;
    std::string unit;

    /// "<value> <unit>" with the shortest exact value text.
    std::string text() const;
    double as(units::Kind kind) const;

    /// Throws std::invalid_argument when the text has no valid unit of `kind`.
    static Quantity parse(std::string_view text, units::Kind kind);

    bool operator==(const Quantity&) const = default;
};

/// Either explicit values or start/stop/count with linear or log spacing.
struct GridSpec {
    std::vector<Quantity> values;
    std::optional<Quantity> start;
    std::optional<Quantity> stop;
    int count = 0;
    std::string spacing = "linear";

    std::vector<double> resolve(units::Kind kind) const;
    bool operator==(const GridSpec&) const = default;
};

struct ReadoutConfig {
    Quantity frequency;
    Quantity kappa;
    Quantity coupling;
    bool operator==(const ReadoutConfig&) const = default;
};

struct QubitConfig {
    Quantity frequency;
    std::optional<Quantity> intrinsic_decay;
    double p_th = 0.028;
    std::optional<ReadoutConfig> readout;
    bool operator==(const QubitConfig&) const = default;
};

struct TlsGroupConfig {
    Quantity frequency;
    Quantity coupling;
    Quantity decay;
    int count = 1;
    bool operator==(const TlsGroupConfig&) const = default;
};

struct BandEdgeConfig {
    Quantity edge;
    Quantity inside;
    Quantity outside;
    bool operator==(const BandEdgeConfig&) const = default;
};

struct CombConfig {
    Quantity anchor;
    Quantity spacing;
    int half_width = 0;
    Quantity coupling;
    std::optional<Quantity> decay;           // uniform lifetime
    std::optional<BandEdgeConfig> band_edge;  // or a step across a band edge
    bool operator==(const CombConfig&) const = default;
};

struct LongLivedConfig {
    double fraction = 0.0;
    Quantity decay;
    bool operator==(const LongLivedConfig&) const = default;
};

struct BathConfig {
    std::vector<TlsGroupConfig> tls;
    std::vector<CombConfig> combs;
    std::optional<LongLivedConfig> long_lived;
    std::optional<Quantity> range_min;
    std::optional<Quantity> range_max;
    bool operator==(const BathConfig&) const = default;
};

struct SequenceConfig {
    Quantity prepare_frequency;
    std::optional<Quantity> interaction_frequency;  // defaults to the qubit frequency
    int pulses = 0;
    Quantity relax_wait{1.0, "us"};
    std::string probe_state = "e";
    GridSpec delays;
    bool detuned_delay = false;
    std::vector<Quantity> interleave;
    Quantity plateau_delay{5.0, "us"};
    std::vector<int> saturation;       // pulse counts for the saturation curve
    std::optional<GridSpec> scan;      // interaction frequencies for a relaxation scan
    std::optional<GridSpec> spectrum;  // probe frequencies for a hole spectrum
    bool operator==(const SequenceConfig&) const = default;
};

struct SimulateConfig {
    std::string initial_state = "e";
    std::optional<GridSpec> delays;
    double noise = 0.0;  // Gaussian sigma added to populations
    bool operator==(const SimulateConfig&) const = default;
};

struct FitConfig {
    std::string model = "bi";
    std::string weighting = "uniform";
    std::string initialization = "peel-off";
    double residual_threshold = 5e-3;
    bool operator==(const FitConfig&) const = default;
};

struct GeometryConfig {
    Quantity area;
    Quantity thickness;
    Quantity rho0;
    Quantity dipole;
    double relative_permittivity = 10.0;
    Quantity capacitance;
    Quantity frequency;  // qubit frequency used for V_zpf
    bool operator==(const GeometryConfig&) const = default;
};

struct DensityConfig {
    std::string law = "fixed";
    std::optional<Quantity> value;            // fixed law
    std::optional<GeometryConfig> geometry;   // mergemon law; reference device if absent
    bool operator==(const DensityConfig&) const = default;
};

struct MapConfig {
    std::optional<GridSpec> coupling;      // g/2pi values
    std::optional<GridSpec> tls_lifetime;  // 1/gamma_t values
    DensityConfig density;
    std::string offset = "fixed";
    double offset_fraction = 0.5;
    std::optional<Quantity> intrinsic_decay;
    bool operator==(const MapConfig&) const = default;
};

struct FreqModelConfig {
    std::optional<GridSpec> frequencies;
    std::optional<Quantity> band_edge;
    std::optional<Quantity> inside;
    std::optional<Quantity> outside;
    std::string coupling_law = "quadratic";
    std::optional<double> coupling_coefficient;
    std::optional<Quantity> density;
    std::optional<ReadoutConfig> readout;
    std::string offset = "fixed";
    double offset_fraction = 0.5;
    bool operator==(const FreqModelConfig&) const = default;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::optional<QubitConfig> qubit;
    std::optional<BathConfig> bath;
    std::optional<SequenceConfig> sequence;
    std::optional<SimulateConfig> simulate;
    std::optional<FitConfig> fit;
    std::optional<MapConfig> map;
    std::optional<FreqModelConfig> freq_model;
    bool operator==(const RunConfig&) const = default;
};

enum class ConfigFormat { yaml, json };

/// Parses and schema-checks a document. Unknown keys, missing required keys,
/// wrong types and unit-less physical values throw ConfigError naming the
/// field path (e.g. "bath.tls[2].decay").
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const RunConfig& config, ConfigFormat format = ConfigFormat::yaml);

/// FNV-1a over the canonical JSON serialisation, as 16 hex digits.
std::string config_hash(const RunConfig& config);
std::string fnv1a_hex(std::string_view bytes);

/// Domain objects built from the config. Missing sections and invalid
/// physics throw ConfigError with the offending path.
QubitParams make_qubit(const RunConfig& config);
BathSpec make_bath(const RunConfig& config);
HoleburnSpec make_holeburn(const RunConfig& config);
FitOptions make_fit_options(const RunConfig& config);
MapSpec make_map_spec(const RunConfig& config);
FreqModelSpec make_freq_model_spec(const RunConfig& config);

/// Builds every section that is present.
void validate_config(const RunConfig& config);

}  // namespace tlsbath
