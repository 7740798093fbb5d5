#include <doctest.h>

#include <cmath>

#include "tlsbath/errors.hpp"
#include "tlsbath/sequence.hpp"
#include "tlsbath/units.hpp"

using namespace tlsbath;

namespace {

QubitParams qubit() {
    QubitParams q;
    q.omega_q = units::ghz(6.3);
    q.gamma_q = 1.0 / 20e-6;
    q.p_th = 0.028;
    return q;
}

HoleburnSpec burn_spec(int pulses) {
    HoleburnSpec s;
    s.omega_0 = units::ghz(6.0);
    s.omega_q = units::ghz(6.3);
    s.n_pulses = pulses;
    s.tau_r = 1e-6;
    s.tau_d_grid = {0.0, 1e-7, 1e-6, 1e-5, 5e-5};
    return s;
}

}  // namespace

TEST_CASE("free decay through a sequence matches direct sampling") {
    const QubitParams q = qubit();
    const BathSpec bath = resonant_cluster(q.omega_q, 3, units::khz(40.0), 1.0 / 5e-6);
    std::vector<PulseEvent> events{event::SetQubitFrequency{q.omega_q}, event::Prepare{QubitState::e},
                                   event::Readout{}, event::Wait{2e-6}, event::Readout{}};
    const SequenceResult r = run_sequence(bath, q, events);
    REQUIRE(r.readout_p_q.size() == 2);
    CHECK(r.readout_p_q[0] == 1.0);
    std::vector<Tls> tls(3, Tls{0.0, units::khz(40.0), 1.0 / 5e-6, q.p_th});
    const DecayTrace direct = sample_trace(SolomonSystem(q, tls, 1.0), std::vector<double>{2e-6});
    CHECK(r.readout_p_q[1] == doctest::Approx(direct.p_q[0]).epsilon(1e-12));
    CHECK(r.elapsed == doctest::Approx(2e-6));
}

TEST_CASE("an infinite wait relaxes to the thermal state") {
    const QubitParams q = qubit();
    const BathSpec bath = resonant_cluster(q.omega_q, 2, units::khz(40.0), 1.0 / 5e-6);
    std::vector<PulseEvent> events{event::SetQubitFrequency{q.omega_q}, event::Prepare{QubitState::e},
                                   event::Wait{INFINITY}, event::Readout{}};
    CHECK(run_sequence(bath, q, events).readout_p_q[0] == doctest::Approx(q.p_th));
}

TEST_CASE("sequence errors") {
    const QubitParams q = qubit();
    BathSpec bath = resonant_cluster(q.omega_q, 1, units::khz(40.0), 1e5);
    bath.omega_min = units::ghz(6.0);
    bath.omega_max = units::ghz(6.5);
    std::vector<PulseEvent> outside{event::SetQubitFrequency{units::ghz(7.0)}};
    CHECK_THROWS_AS(run_sequence(bath, q, outside), DomainError);
    std::vector<PulseEvent> negative{event::Wait{-1.0}};
    CHECK_THROWS_AS(run_sequence(bath, q, negative), ArgumentError);
    CHECK_THROWS_AS(parse_qubit_state("x"), ArgumentError);
    CHECK(parse_qubit_state("excited") == QubitState::e);
}

TEST_CASE("comb and merge builders") {
    const BathSpec comb = comb_bath(units::ghz(6.0), units::mhz(1.0), 5, units::khz(10.0), 1e5);
    CHECK(comb.tls.size() == 11);
    CHECK(comb.omega_min == doctest::Approx(units::ghz(6.0) - units::mhz(5.0)));
    const BathSpec profiled =
        comb_bath(units::ghz(6.0), units::mhz(1.0), 2, units::khz(10.0), BandGapProfile{units::ghz(6.0), 1.0, 2.0});
    CHECK(profiled.tls.front().gamma_t == 2.0);
    CHECK(profiled.tls.back().gamma_t == 1.0);
    const BathSpec merged = merge(comb, resonant_cluster(units::ghz(6.001), 2, units::khz(5.0), 1e4));
    CHECK(merged.tls.size() == 13);
    const BathSpec ll = with_long_lived_fraction(comb, 0.2, 1.0);
    int n_long = 0;
    for (const auto& t : ll.tls) n_long += t.gamma_t == 1.0;
    CHECK(n_long == 2);
    CHECK_THROWS_AS(with_long_lived_fraction(comb, 1.5, 1.0), DomainError);
}

TEST_CASE("hole-burning trace equals one run_sequence per delay") {
    const QubitParams q = qubit();
    const BathSpec bath = resonant_cluster(q.omega_q, 20, units::khz(20.0), 1.0 / 34e-6);
    for (bool detuned : {false, true}) {
        HoleburnSpec spec = burn_spec(15);
        spec.detuned_delay = detuned;
        spec.interleave = {units::ghz(6.3), units::ghz(6.2999)};
        const DecayTrace trace = holeburn_trace(spec, bath, q);
        REQUIRE(trace.size() == spec.tau_d_grid.size());
        for (std::size_t i = 0; i < spec.tau_d_grid.size(); ++i) {
            const auto events = holeburn_events(spec, spec.tau_d_grid[i]);
            CHECK(trace.p_q[i] == doctest::Approx(run_sequence(bath, q, events).readout_p_q.back()).epsilon(1e-11));
        }
        CHECK(trace.sequence_id == (detuned ? "holeburn-detuned" : "holeburn"));
    }
}

TEST_CASE("burning raises the plateau monotonically") {
    const QubitParams q = qubit();
    const BathSpec bath = resonant_cluster(q.omega_q, 50, units::khz(50.0), 1.0 / 34e-6);
    const std::vector<int> counts{0, 5, 20, 60};
    const Series s = holeburn_saturation_curve(burn_spec(0), bath, q, counts);
    REQUIRE(s.y.size() == 4);
    CHECK(s.y[0] > q.p_th);
    CHECK(s.y[0] < 1.0);
    for (std::size_t i = 1; i < s.y.size(); ++i) CHECK(s.y[i] > s.y[i - 1]);
    const std::vector<int> bad{3, 1};
    CHECK_THROWS_AS(holeburn_saturation_curve(burn_spec(0), bath, q, bad), ArgumentError);
}

TEST_CASE("hole spectrum peaks at the burn frequency") {
    QubitParams q = qubit();
    q.gamma_q = 1.0 / 200e-6;
    const BathSpec bath = comb_bath(units::ghz(6.3), units::khz(200.0), 100, units::khz(30.0), 1.0 / 34e-6);
    HoleburnSpec spec = burn_spec(60);
    spec.omega_0 = units::ghz(6.285);
    std::vector<double> probes;
    for (int k = -20; k <= 20; ++k) probes.push_back(units::ghz(6.3) + units::mhz(0.5 * k));
    const SpectrumResult r = holeburn_spectrum(spec, probes, bath, q);
    CHECK(std::abs(r.peak_omega - units::ghz(6.3)) <= units::mhz(0.5));
    CHECK(r.fwhm > 0.0);
}

TEST_CASE("peak finding and widths") {
    Series s;
    for (int i = 0; i <= 100; ++i) {
        const double x = i;
        s.x.push_back(x);
        s.y.push_back(std::exp(-std::pow((x - 30.0) / 4.0, 2)) + 0.5 * std::exp(-std::pow((x - 70.0) / 4.0, 2)));
    }
    const auto peaks = find_peaks(s, 0.0, 0.1);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0] == 30);
    CHECK(peaks[1] == 70);
    CHECK(full_width_half_max(s, 0.0) == doctest::Approx(2.0 * 4.0 * std::sqrt(std::log(2.0))).epsilon(0.01));
}

TEST_CASE("relaxation scan does not depend on the thread count") {
    const QubitParams q = qubit();
    const BathSpec bath = comb_bath(units::ghz(6.3), units::mhz(1.0), 20, units::khz(30.0), 1.0 / 34e-6);
    HoleburnSpec spec = burn_spec(10);
    spec.omega_0 = units::ghz(6.29);
    const std::vector<double> freqs{units::ghz(6.295), units::ghz(6.3), units::ghz(6.305), units::ghz(6.31)};
    const auto serial = relaxation_scan(spec, freqs, bath, q, 1);
    const auto parallel = relaxation_scan(spec, freqs, bath, q, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].p_q == parallel[i].p_q);
}
