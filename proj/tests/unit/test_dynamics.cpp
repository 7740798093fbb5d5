#include <doctest.h>

#include <cmath>
#include <random>

#include "ode_oracle.hpp"
#include "tlsbath/dynamics.hpp"
#include "tlsbath/errors.hpp"
#include "tlsbath/fitting.hpp"
#include "tlsbath/units.hpp"

using namespace tlsbath;

namespace {

SolomonSystem small_system(double p_q = 1.0) {
    QubitParams q;
    q.omega_q = units::ghz(6.0);
    q.gamma_q = 1.0 / 20e-6;
    q.p_th = 0.03;
    std::vector<Tls> tls{{units::mhz(0.2), units::khz(200.0), 1.0 / 2e-6, 0.4},
                         {units::mhz(-1.0), units::khz(80.0), 1.0 / 30e-6, 0.1},
                         {0.0, units::khz(30.0), 1.0 / 100e-9, 0.0}};
    return SolomonSystem(q, tls, p_q);
}

}  // namespace

TEST_CASE("generator is a symmetric arrowhead with the thermal fixed point") {
    const SolomonSystem sys = small_system();
    const Generator gen = build_generator(sys);
    CHECK((gen.a - gen.a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 1; i < gen.a.rows(); ++i) {
        for (int j = 1; j < gen.a.cols(); ++j) {
            if (i != j) CHECK(gen.a(i, j) == 0.0);
        }
    }
    const Eigen::VectorXd thermal = Eigen::VectorXd::Constant(gen.a.rows(), 0.03);
    CHECK((gen.a * thermal + gen.r).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(sys.gamma_1() == doctest::Approx(-gen.a(0, 0)));
}

TEST_CASE("eigen and Pade propagation agree with the ODE reference") {
    const SolomonSystem sys = small_system();
    oracle::OracleSystem ref{sys.qubit().gamma_q, sys.qubit().p_th, {}};
    for (const auto& t : sys.tls()) ref.tls.push_back({t.delta, t.g, t.gamma_t});
    const std::vector<double> times{0.0, 1e-8, 1e-7, 1e-6, 5e-6, 3e-5};
    const Eigen::VectorXd p0 = sys.state();
    const auto expected = oracle::integrate(ref, {p0.data(), p0.data() + p0.size()}, times);
    for (auto method : {PropagationMethod::eigen, PropagationMethod::pade}) {
        const Propagator prop(sys, method);
        const Eigen::MatrixXd got = prop.propagate_many(p0, times);
        for (std::size_t j = 0; j < times.size(); ++j) {
            for (int i = 0; i < p0.size(); ++i) CHECK(got(i, j) == doctest::Approx(expected[j][i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("evolve composes and zero duration is the identity") {
    const SolomonSystem sys = small_system();
    const SolomonSystem same = evolve(sys, 0.0);
    CHECK((same.state() - sys.state()).norm() == 0.0);
    const SolomonSystem two = evolve(evolve(sys, 1e-6), 2e-6);
    const SolomonSystem one = evolve(sys, 3e-6);
    CHECK((two.state() - one.state()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("total excitation is conserved when dissipation is negligible") {
    QubitParams q;
    q.omega_q = units::ghz(6.0);
    q.p_th = 0.0;
    std::vector<Tls> tls(4, Tls{0.0, units::khz(100.0), 1e-3, 0.0});
    const SolomonSystem sys(q, tls, 1.0);
    const DecayTrace tr = sample_trace(sys, std::vector<double>{0.0, 1e-6, 1e-3}, true);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        double total = tr.p_q[i];
        for (double p : tr.p_t[i]) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-5));
    }
    CHECK(tr.p_q.back() == doctest::Approx(0.2).epsilon(1e-5));
}

TEST_CASE("clamping tolerates rounding only") {
    Eigen::VectorXd v(3);
    v << -1e-12, 0.5, 1.0 + 1e-12;
    clamp_populations(v);
    CHECK(v[0] == 0.0);
    CHECK(v[2] == 1.0);
    v << -1e-3, 0.5, 0.5;
    CHECK_THROWS_AS(clamp_populations(v), NumericError);
    v << std::nan(""), 0.5, 0.5;
    CHECK_THROWS_AS(clamp_populations(v), NumericError);
}

TEST_CASE("transition rates and equilibrium") {
    const SolomonSystem sys = small_system(0.5);
    const TransitionRates r = transition_rates(sys);
    CHECK(r.gamma_up + r.gamma_down == doctest::Approx(sys.gamma_1()));
    CHECK(equilibrium_population(sys) == doctest::Approx(r.gamma_up / sys.gamma_1()));
}

TEST_CASE("adiabatic solution starts at p_q0 and ends at p_th") {
    CHECK(biexp_solution(1e6, 9e5, 3e4, 1.0, 0.3, 0.028, 0.0) == doctest::Approx(1.0));
    CHECK(biexp_solution(1e6, 9e5, 3e4, 1.0, 0.3, 0.028, 1.0) == doctest::Approx(0.028));
    CHECK(steady_state_holeburn(100, 1.0 / 34e-6, 1e-6) == doctest::Approx(1.0 / (1.0 + 100.0 / 34.0)));
}

TEST_CASE("trace validation") {
    DecayTrace t;
    t.times = {0.0, 1.0};
    t.p_q = {1.0};
    CHECK_THROWS_AS(t.validate(), ArgumentError);
    t.p_q = {1.0, 0.5};
    CHECK_NOTHROW(t.validate());
    t.times = {1.0, 1.0};
    CHECK_THROWS_AS(t.validate(), ArgumentError);
}
