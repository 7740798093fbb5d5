#pragma once

// Ideal pulse sequences over the Solomon dynamics. Pulses are instantaneous,
// frequency changes are instantaneous, and every Wait is propagated exactly.
// TLS frequencies are absolute here; detunings are recomputed from scratch on
// each frequency change so the result never depends on the tuning history.

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tlsbath/dynamics.hpp"
#include "tlsbath/model.hpp"

namespace tlsbath {

enum class QubitState { g, e };

std::string to_string(QubitState state);
QubitState parse_qubit_state(const std::string& text);

namespace event {
struct Prepare {
    QubitState state = QubitState::e;
};
struct SetQubitFrequency {
    double omega = 0.0;
};
struct Wait {
    double tau = 0.0;  // seconds; +inf relaxes to the fixed point
};
struct Readout {};
}  // namespace event

using PulseEvent = std::variant<event::Prepare, event::SetQubitFrequency, event::Wait, event::Readout>;

struct BathTls {
    double omega = 0.0;  // absolute frequency
    double g = 0.0;
    double gamma_t = 0.0;
};

/// TLSs at absolute frequencies, valid for qubit frequencies in
/// [omega_min, omega_max].
struct BathSpec {
    std::vector<BathTls> tls;
    double omega_min = -std::numeric_limits<double>::infinity();
    double omega_max = std::numeric_limits<double>::infinity();

    bool covers(double omega) const { return omega >= omega_min && omega <= omega_max; }
    void validate() const;
};

/// Step-like TLS lifetime across a phononic band edge: gamma_inside above
/// `edge`, gamma_outside at or below it.
struct BandGapProfile {
    double edge = 0.0;
    double gamma_inside = 1.0 / 34e-6;
    double gamma_outside = 1.0 / 100e-9;

    double operator()(double omega) const { return omega > edge ? gamma_inside : gamma_outside; }
};

/// `count` identical TLSs at one frequency.
BathSpec resonant_cluster(double omega, std::size_t count, double g, double gamma_t);

/// Comb anchored at `anchor`: TLSs at anchor + k * spacing for |k| <= half_width,
/// with lifetime given per frequency. Range is the comb span.
BathSpec comb_bath(double anchor, double spacing, int half_width, double g,
                   const std::function<double(double)>& gamma_t_of_omega);

/// Comb with a single lifetime.
BathSpec comb_bath(double anchor, double spacing, int half_width, double g, double gamma_t);

/// Union of two baths; range is the intersection.
BathSpec merge(const BathSpec& a, const BathSpec& b);

/// Marks a deterministic, evenly spread `fraction` of the TLSs as long-lived
/// (decay rate `gamma_t_long`); the rest keep their rates.
BathSpec with_long_lived_fraction(const BathSpec& bath, double fraction, double gamma_t_long);

/// Result of one run: every Readout, plus the final full state.
struct SequenceResult {
    std::vector<double> readout_times;   // elapsed time at each readout
    std::vector<double> readout_p_q;
    std::vector<double> readout_omega;
    std::vector<Eigen::VectorXd> readout_states;  // (p_q, p_t...) at each readout
    Eigen::VectorXd final_state;
    double final_omega = 0.0;
    double elapsed = 0.0;

    /// Readouts as a trace (times must be strictly increasing).
    DecayTrace trace() const;
};

/// Runs events against a bath starting from the thermal state (or from
/// `initial` when given). Throws DomainError when the qubit is tuned outside
/// the bath range.
SequenceResult run_sequence(const BathSpec& bath, const QubitParams& qubit,
                            std::span<const PulseEvent> events);
SequenceResult run_sequence(const BathSpec& bath, const QubitParams& qubit,
                            std::span<const PulseEvent> events, const Eigen::VectorXd& initial,
                            double initial_omega);

struct HoleburnSpec {
    double omega_0 = 0.0;   // preparation / readout frequency
    double omega_q = 0.0;   // interaction frequency
    int n_pulses = 0;
    double tau_r = 1e-6;
    QubitState probe_state = QubitState::e;
    std::vector<double> tau_d_grid;
    bool detuned_delay = false;
    std::vector<double> interleave;  // interaction frequencies cycled per pulse
    double plateau_delay = 5e-6;     // p_eq is read as p_q(tau_d = plateau_delay)

    void validate() const;
};

/// Burn phase: n_pulses x (tune to omega_0, prepare e, tune to the
/// interaction frequency, wait tau_r).
std::vector<PulseEvent> burn_events(const HoleburnSpec& spec);

/// Probe phase for one delay. Standard: prepare probe_state at omega_0, tune to
/// omega_q, wait tau_d, read. Detuned: park at omega_0 for tau_d, tune to
/// omega_q for tau_r, tune back and read.
std::vector<PulseEvent> probe_events(const HoleburnSpec& spec, double tau_d);

/// Burn followed by one probe.
std::vector<PulseEvent> holeburn_events(const HoleburnSpec& spec, double tau_d);

/// Caches one propagator per qubit frequency for a fixed bath and qubit.
class SequenceEngine {
public:
    SequenceEngine(BathSpec bath, QubitParams qubit);

    const BathSpec& bath() const { return bath_; }
    const QubitParams& qubit() const { return qubit_; }

    /// All populations at p_th.
    Eigen::VectorXd thermal_state() const;

    /// Solomon system at `omega` holding `state`.
    SolomonSystem system_at(double omega, const Eigen::VectorXd& state) const;

    const Propagator& propagator(double omega);

    SequenceResult run(std::span<const PulseEvent> events, const Eigen::VectorXd& initial,
                       double initial_omega);

private:
    BathSpec bath_;
    QubitParams qubit_;
    std::map<double, std::unique_ptr<Propagator>> cache_;
};

/// Qubit relaxation over spec.tau_d_grid after the burn; each delay is an
/// independent shot from the thermal state. Equivalent to one run_sequence per
/// delay, computed with a shared burn.
DecayTrace holeburn_trace(const HoleburnSpec& spec, const BathSpec& bath, const QubitParams& qubit);
DecayTrace holeburn_trace(const HoleburnSpec& spec, SequenceEngine& engine);

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

/// p_eq (qubit population after plateau_delay) versus number of burn pulses.
/// `pulse_counts` must be non-decreasing.
Series holeburn_saturation_curve(const HoleburnSpec& spec, const BathSpec& bath,
                                 const QubitParams& qubit, std::span<const int> pulse_counts);

struct SpectrumResult {
    Series series;            // x: probe frequency (rad/s), y: p_eq
    double peak_omega = 0.0;  // location of the maximum
    double fwhm = 0.0;        // full width at half maximum of p_eq - p_th, rad/s; 0 if unresolved
};

/// Burn per spec, then probe each frequency for plateau_delay.
SpectrumResult holeburn_spectrum(const HoleburnSpec& spec, std::span<const double> probe_frequencies,
                                 const BathSpec& bath, const QubitParams& qubit);

/// Indices of local maxima of y whose excess over `baseline` exceeds
/// `min_height` and that are separated from neighbouring peaks by a dip below
/// half their height.
std::vector<std::size_t> find_peaks(const Series& series, double baseline, double min_height);

/// Full width at half maximum of (y - baseline) around the global maximum,
/// with linear interpolation between samples; 0 if a flank never crosses.
double full_width_half_max(const Series& series, double baseline);

/// One holeburn_trace per interaction frequency. `threads` <= 1 runs serially;
/// results do not depend on the thread count.
std::vector<DecayTrace> relaxation_scan(const HoleburnSpec& spec, std::span<const double> frequencies,
                                        const BathSpec& bath, const QubitParams& qubit,
                                        unsigned threads = 1);

}  // namespace tlsbath
