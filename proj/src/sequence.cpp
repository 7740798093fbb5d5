#include "tlsbath/sequence.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <thread>
#include <type_traits>

#include "tlsbath/errors.hpp"
#include "tlsbath/units.hpp"

namespace tlsbath {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double prepared_population(QubitState state) { return state == QubitState::e ? 1.0 : 0.0; }

void require_covered(const BathSpec& bath, double omega) {
    if (!bath.covers(omega)) {
        throw DomainError("qubit frequency " + std::to_string(units::to_hz(omega)) +
                          " Hz lies outside the bath range");
    }
}

// p_q read out after one probe of a burned state.
double probe_population(SequenceEngine& engine, const HoleburnSpec& spec, const Eigen::VectorXd& burned,
                        double tau_d) {
    Eigen::VectorXd state = burned;
    if (spec.detuned_delay) {
        state = engine.propagator(spec.omega_0).propagate(state, tau_d);
        clamp_populations(state);
        state = engine.propagator(spec.omega_q).propagate(state, spec.tau_r);
    } else {
        state(0) = prepared_population(spec.probe_state);
        state = engine.propagator(spec.omega_q).propagate(state, tau_d);
    }
    clamp_populations(state);
    return state(0);
}

Eigen::VectorXd burn(SequenceEngine& engine, const HoleburnSpec& spec) {
    const auto events = burn_events(spec);
    return engine.run(events, engine.thermal_state(), engine.qubit().omega_q).final_state;
}

}  // namespace

std::string to_string(QubitState state) { return state == QubitState::e ? "e" : "g"; }

QubitState parse_qubit_state(const std::string& text) {
    if (text == "e" || text == "E" || text == "excited") return QubitState::e;
    if (text == "g" || text == "G" || text == "ground") return QubitState::g;
    throw ArgumentError("qubit state must be 'g' or 'e', got '" + text + "'");
}

void BathSpec::validate() const {
    if (!(omega_min <= omega_max)) throw DomainError("bath range is empty");
    for (const auto& t : tls) {
        if (!std::isfinite(t.omega)) throw DomainError("bath TLS frequency must be finite");
        if (!(t.g >= 0.0)) throw DomainError("bath TLS coupling must be non-negative");
        if (!(t.gamma_t >= 0.0)) throw DomainError("bath TLS decay rate must be non-negative");
    }
}

BathSpec resonant_cluster(double omega, std::size_t count, double g, double gamma_t) {
    BathSpec bath;
    bath.tls.assign(count, BathTls{omega, g, gamma_t});
    return bath;
}

BathSpec comb_bath(double anchor, double spacing, int half_width, double g,
                   const std::function<double(double)>& gamma_t_of_omega) {
    if (!(spacing > 0.0)) throw DomainError("comb spacing must be positive");
    if (half_width < 0) throw DomainError("comb half width must be non-negative");
    BathSpec bath;
    bath.tls.reserve(2 * static_cast<std::size_t>(half_width) + 1);
    for (int k = -half_width; k <= half_width; ++k) {
        const double omega = anchor + static_cast<double>(k) * spacing;
        bath.tls.push_back({omega, g, gamma_t_of_omega(omega)});
    }
    bath.omega_min = anchor - static_cast<double>(half_width) * spacing;
    bath.omega_max = anchor + static_cast<double>(half_width) * spacing;
    return bath;
}

BathSpec comb_bath(double anchor, double spacing, int half_width, double g, double gamma_t) {
    return comb_bath(anchor, spacing, half_width, g, [gamma_t](double) { return gamma_t; });
}

BathSpec merge(const BathSpec& a, const BathSpec& b) {
    BathSpec out = a;
    out.tls.insert(out.tls.end(), b.tls.begin(), b.tls.end());
    out.omega_min = std::max(a.omega_min, b.omega_min);
    out.omega_max = std::min(a.omega_max, b.omega_max);
    return out;
}

BathSpec with_long_lived_fraction(const BathSpec& bath, double fraction, double gamma_t_long) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw DomainError("long-lived fraction must lie in [0, 1]");
    BathSpec out = bath;
    for (std::size_t i = 0; i < out.tls.size(); ++i) {
        const auto before = std::floor(static_cast<double>(i) * fraction);
        const auto after = std::floor(static_cast<double>(i + 1) * fraction);
        if (after > before) out.tls[i].gamma_t = gamma_t_long;
    }
    return out;
}

DecayTrace SequenceResult::trace() const {
    DecayTrace t;
    t.times = readout_times;
    t.p_q = readout_p_q;
    if (!readout_omega.empty()) t.omega = readout_omega.back();
    t.validate();
    return t;
}

SequenceEngine::SequenceEngine(BathSpec bath, QubitParams qubit)
    : bath_(std::move(bath)), qubit_(qubit) {
    bath_.validate();
    qubit_.validate();
}

Eigen::VectorXd SequenceEngine::thermal_state() const {
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(bath_.tls.size() + 1), qubit_.p_th);
}

SolomonSystem SequenceEngine::system_at(double omega, const Eigen::VectorXd& state) const {
    QubitParams q = qubit_;
    q.omega_q = omega;
    std::vector<Tls> tls;
    tls.reserve(bath_.tls.size());
    for (std::size_t k = 0; k < bath_.tls.size(); ++k) {
        const auto& b = bath_.tls[k];
        tls.push_back({b.omega - omega, b.g, b.gamma_t, state(static_cast<Eigen::Index>(k + 1))});
    }
    return SolomonSystem(q, std::move(tls), state(0));
}

const Propagator& SequenceEngine::propagator(double omega) {
    auto it = cache_.find(omega);
    if (it == cache_.end()) {
        const auto system = system_at(omega, thermal_state());
        it = cache_.emplace(omega, std::make_unique<Propagator>(system)).first;
    }
    return *it->second;
}

SequenceResult SequenceEngine::run(std::span<const PulseEvent> events, const Eigen::VectorXd& initial,
                                   double initial_omega) {
    if (static_cast<std::size_t>(initial.size()) != bath_.tls.size() + 1) {
        throw ArgumentError("initial state size does not match bath");
    }
    SequenceResult result;
    Eigen::VectorXd state = initial;
    double omega = initial_omega;
    double elapsed = 0.0;

    for (const PulseEvent& ev : events) {
        std::visit(Overloaded{
                       [&](const event::Prepare& p) { state(0) = prepared_population(p.state); },
                       [&](const event::SetQubitFrequency& f) {
                           require_covered(bath_, f.omega);
                           omega = f.omega;
                       },
                       [&](const event::Wait& w) {
                           if (!(w.tau >= 0.0)) throw ArgumentError("wait duration must be non-negative");
                           if (std::isinf(w.tau)) {
                               state = thermal_state();
                           } else if (w.tau > 0.0) {
                               state = propagator(omega).propagate(state, w.tau);
                               clamp_populations(state);
                           }
                           elapsed += w.tau;
                       },
                       [&](const event::Readout&) {
                           result.readout_times.push_back(elapsed);
                           result.readout_p_q.push_back(state(0));
                           result.readout_omega.push_back(omega);
                           result.readout_states.push_back(state);
                       },
                   },
                   ev);
    }
    result.final_state = std::move(state);
    result.final_omega = omega;
    result.elapsed = elapsed;
    return result;
}

SequenceResult run_sequence(const BathSpec& bath, const QubitParams& qubit,
                            std::span<const PulseEvent> events) {
    SequenceEngine engine(bath, qubit);
    return engine.run(events, engine.thermal_state(), qubit.omega_q);
}

SequenceResult run_sequence(const BathSpec& bath, const QubitParams& qubit,
                            std::span<const PulseEvent> events, const Eigen::VectorXd& initial,
                            double initial_omega) {
    SequenceEngine engine(bath, qubit);
    return engine.run(events, initial, initial_omega);
}

void HoleburnSpec::validate() const {
    if (n_pulses < 0) throw ArgumentError("holeburn: pulse count must be non-negative");
    if (!(tau_r > 0.0)) throw ArgumentError("holeburn: tau_r must be positive");
    if (!(plateau_delay >= 0.0)) throw ArgumentError("holeburn: plateau delay must be non-negative");
    for (std::size_t i = 0; i < tau_d_grid.size(); ++i) {
        if (!(tau_d_grid[i] >= 0.0)) throw ArgumentError("holeburn: delays must be non-negative");
        if (i > 0 && !(tau_d_grid[i] > tau_d_grid[i - 1])) {
            throw ArgumentError("holeburn: delay grid must be strictly increasing");
        }
    }
}

std::vector<PulseEvent> burn_events(const HoleburnSpec& spec) {
    std::vector<PulseEvent> events;
    events.reserve(static_cast<std::size_t>(spec.n_pulses) * 4);
    for (int i = 0; i < spec.n_pulses; ++i) {
        const double interaction =
            spec.interleave.empty()
                ? spec.omega_q
                : spec.interleave[static_cast<std::size_t>(i) % spec.interleave.size()];
        events.emplace_back(event::SetQubitFrequency{spec.omega_0});
        events.emplace_back(event::Prepare{QubitState::e});
        events.emplace_back(event::SetQubitFrequency{interaction});
        events.emplace_back(event::Wait{spec.tau_r});
    }
    return events;
}

std::vector<PulseEvent> probe_events(const HoleburnSpec& spec, double tau_d) {
    std::vector<PulseEvent> events;
    if (spec.detuned_delay) {
        events.emplace_back(event::SetQubitFrequency{spec.omega_0});
        events.emplace_back(event::Wait{tau_d});
        events.emplace_back(event::SetQubitFrequency{spec.omega_q});
        events.emplace_back(event::Wait{spec.tau_r});
        events.emplace_back(event::SetQubitFrequency{spec.omega_0});
        events.emplace_back(event::Readout{});
    } else {
        events.emplace_back(event::SetQubitFrequency{spec.omega_0});
        events.emplace_back(event::Prepare{spec.probe_state});
        events.emplace_back(event::SetQubitFrequency{spec.omega_q});
        events.emplace_back(event::Wait{tau_d});
        events.emplace_back(event::Readout{});
    }
    return events;
}

std::vector<PulseEvent> holeburn_events(const HoleburnSpec& spec, double tau_d) {
    auto events = burn_events(spec);
    auto probe = probe_events(spec, tau_d);
    events.insert(events.end(), probe.begin(), probe.end());
    return events;
}

DecayTrace holeburn_trace(const HoleburnSpec& spec, const BathSpec& bath, const QubitParams& qubit) {
    SequenceEngine engine(bath, qubit);
    return holeburn_trace(spec, engine);
}

DecayTrace holeburn_trace(const HoleburnSpec& spec, SequenceEngine& engine) {
    spec.validate();
    require_covered(engine.bath(), spec.omega_0);
    require_covered(engine.bath(), spec.omega_q);
    for (double w : spec.interleave) require_covered(engine.bath(), w);

    const Eigen::VectorXd burned = burn(engine, spec);

    DecayTrace trace;
    trace.times = spec.tau_d_grid;
    trace.omega = spec.omega_q;
    trace.probe_state = spec.detuned_delay ? "" : to_string(spec.probe_state);
    trace.sequence_id = spec.detuned_delay ? "holeburn-detuned" : "holeburn";
    trace.p_q.reserve(spec.tau_d_grid.size());

    if (spec.detuned_delay) {
        Eigen::MatrixXd parked = engine.propagator(spec.omega_0).propagate_many(burned, spec.tau_d_grid);
        const Propagator& thermalise = engine.propagator(spec.omega_q);
        for (Eigen::Index j = 0; j < parked.cols(); ++j) {
            Eigen::VectorXd state = parked.col(j);
            clamp_populations(state);
            state = thermalise.propagate(state, spec.tau_r);
            clamp_populations(state);
            trace.p_q.push_back(state(0));
        }
    } else {
        Eigen::VectorXd start = burned;
        start(0) = prepared_population(spec.probe_state);
        Eigen::MatrixXd states = engine.propagator(spec.omega_q).propagate_many(start, spec.tau_d_grid);
        for (Eigen::Index j = 0; j < states.cols(); ++j) {
            clamp_populations(states.col(j));
            trace.p_q.push_back(states(0, j));
        }
    }
    return trace;
}

Series holeburn_saturation_curve(const HoleburnSpec& spec, const BathSpec& bath, const QubitParams& qubit,
                                 std::span<const int> pulse_counts) {
    spec.validate();
    SequenceEngine engine(bath, qubit);
    require_covered(bath, spec.omega_0);
    require_covered(bath, spec.omega_q);

    Series out;
    Eigen::VectorXd state = engine.thermal_state();
    int done = 0;
    for (int target : pulse_counts) {
        if (target < done) throw ArgumentError("saturation curve: pulse counts must be non-decreasing");
        HoleburnSpec step = spec;
        step.n_pulses = target - done;
        // Interleaving continues where the previous block stopped.
        if (!spec.interleave.empty()) {
            std::vector<double> rotated(spec.interleave.size());
            for (std::size_t i = 0; i < rotated.size(); ++i) {
                rotated[i] = spec.interleave[(i + static_cast<std::size_t>(done)) % rotated.size()];
            }
            step.interleave = std::move(rotated);
        }
        const auto events = burn_events(step);
        state = engine.run(events, state, qubit.omega_q).final_state;
        done = target;
        out.x.push_back(static_cast<double>(target));
        out.y.push_back(probe_population(engine, spec, state, spec.plateau_delay));
    }
    return out;
}

SpectrumResult holeburn_spectrum(const HoleburnSpec& spec, std::span<const double> probe_frequencies,
                                 const BathSpec& bath, const QubitParams& qubit) {
    spec.validate();
    SequenceEngine engine(bath, qubit);
    require_covered(bath, spec.omega_0);
    for (double w : probe_frequencies) require_covered(bath, w);
    const Eigen::VectorXd burned = burn(engine, spec);

    SpectrumResult result;
    for (double w : probe_frequencies) {
        HoleburnSpec probe = spec;
        probe.omega_q = w;
        result.series.x.push_back(w);
        result.series.y.push_back(probe_population(engine, probe, burned, spec.plateau_delay));
    }
    if (!result.series.y.empty()) {
        const auto it = std::max_element(result.series.y.begin(), result.series.y.end());
        result.peak_omega = result.series.x[static_cast<std::size_t>(it - result.series.y.begin())];
        result.fwhm = full_width_half_max(result.series, qubit.p_th);
    }
    return result;
}

double full_width_half_max(const Series& series, double baseline) {
    const auto& x = series.x;
    const auto& y = series.y;
    if (y.size() < 3) return 0.0;
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double half = baseline + 0.5 * (y[peak] - baseline);
    if (!(y[peak] > baseline)) return 0.0;

    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double f = (y[inside] - half) / (y[inside] - y[outside]);
        return x[inside] + f * (x[outside] - x[inside]);
    };
    std::size_t i = peak;
    while (i > 0 && y[i - 1] >= half) --i;
    if (i == 0) return 0.0;
    const double left = crossing(i, i - 1);
    std::size_t j = peak;
    while (j + 1 < y.size() && y[j + 1] >= half) ++j;
    if (j + 1 == y.size()) return 0.0;
    const double right = crossing(j, j + 1);
    return std::abs(right - left);
}

std::vector<std::size_t> find_peaks(const Series& series, double baseline, double min_height) {
    const auto& y = series.y;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool left_ok = i == 0 || y[i] > y[i - 1];
        const bool right_ok = i + 1 == y.size() || y[i] >= y[i + 1];
        if (left_ok && right_ok && y[i] - baseline > min_height) candidates.push_back(i);
    }
    // Merge neighbours that are not separated by a dip below half height.
    std::vector<std::size_t> peaks;
    for (std::size_t idx : candidates) {
        if (!peaks.empty()) {
            const std::size_t prev = peaks.back();
            const double dip = *std::min_element(y.begin() + static_cast<std::ptrdiff_t>(prev),
                                                 y.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
            const double lower = std::min(y[prev], y[idx]) - baseline;
            if (dip - baseline > 0.5 * lower) {
                if (y[idx] > y[prev]) peaks.back() = idx;
                continue;
            }
        }
        peaks.push_back(idx);
    }
    return peaks;
}

std::vector<DecayTrace> relaxation_scan(const HoleburnSpec& spec, std::span<const double> frequencies,
                                        const BathSpec& bath, const QubitParams& qubit, unsigned threads) {
    spec.validate();
    if (frequencies.empty()) throw ArgumentError("relaxation_scan: frequency grid is empty");
    if (spec.tau_d_grid.empty()) throw ArgumentError("relaxation_scan: delay grid is empty");

    std::vector<DecayTrace> out(frequencies.size());
    auto work = [&](std::size_t i) {
        HoleburnSpec cell = spec;
        cell.omega_q = frequencies[i];
        cell.interleave.clear();
        out[i] = holeburn_trace(cell, bath, qubit);
    };
    if (threads <= 1 || frequencies.size() == 1) {
        for (std::size_t i = 0; i < frequencies.size(); ++i) work(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < frequencies.size(); i = next++) work(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace tlsbath
