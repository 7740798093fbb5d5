// Acceptance suite. Prints one PASS/FAIL line per criterion; with a numeric
// argument runs only that criterion. Exit status is non-zero if any
// selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "comb_oracle.hpp"
#include "ode_oracle.hpp"
#include "tlsbath/cli.hpp"
#include "tlsbath/dynamics.hpp"
#include "tlsbath/fitting.hpp"
#include "tlsbath/model.hpp"
#include "tlsbath/regimes.hpp"
#include "tlsbath/sequence.hpp"
#include "tlsbath/units.hpp"

using namespace tlsbath;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "[ok] " : "[FAIL] ") + what);
    }
    void info(const std::string& what) { notes.push_back("[info] " + what); }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// ---------------------------------------------------------------------------

Outcome closed_form_vs_direct() {
    Outcome o;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    double closed_time = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 1000; ++i) {
        const double a = log_uniform(rng, 1e-3, 1e3);
        const double b = log_uniform(rng, 1e-3, 10.0);
        const double c = unit(rng) / b;
        const auto tc = std::chrono::steady_clock::now();
        const double closed = comb_sum_closed_form(a, b, c);
        closed_time += seconds_since(tc);
        const double direct = oracle::comb_sum_direct(a, b, c);
        worst = std::max(worst, std::abs(closed - direct) / direct);
    }
    const double total = seconds_since(t0);
    o.check(worst < 1e-10, "max relative error " + fmt("%.2e", worst) + " over 1000 samples (< 1e-10)");
    o.check(total < 10.0, "runtime " + fmt("%.2f", total) + " s including the 2e6-term direct sums (< 10 s)");
    o.info("closed form alone: " + fmt("%.2e", closed_time) + " s");
    return o;
}

Outcome fermi_asymptote() {
    Outcome o;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = log_uniform(rng, 1e-3, 1e3);
        const double b = log_uniform(rng, 1.0, 1e3);
        const double c = unit(rng) / b;
        worst = std::max(worst, std::abs(comb_sum_closed_form(a, b, c) / (units::pi * a * b) - 1.0));
    }
    o.check(worst < 0.01, "closed form vs pi a b for b >= 1: worst " + fmt("%.2e", worst) + " (< 1%)");

    double worst_rate = 0.0;
    for (int i = 0; i < 200; ++i) {
        QubitParams q;
        q.omega_q = units::ghz(6.3);
        UniformComb comb;
        comb.g = units::khz(log_uniform(rng, 10.0, 1000.0));
        comb.gamma_t = 1.0 / log_uniform(rng, 10e-9, 1e-6);
        const double gamma_m = mutual_decoherence(0.0, comb.gamma_t);
        const double b = log_uniform(rng, 1.0, 100.0);
        comb.spacing = gamma_m / b;
        comb.offset = unit(rng) * 0.5 * comb.spacing;
        const double rate = comb_decay_rate(q, comb);
        worst_rate = std::max(worst_rate, std::abs(rate / fermi_rate(comb.g, comb.density()) - 1.0));
    }
    o.check(worst_rate < 0.01, "comb decay rate vs 2 pi g^2 rho: worst " + fmt("%.2e", worst_rate) + " (< 1%)");
    return o;
}

Outcome purcell_asymptote() {
    Outcome o;
    double worst = 0.0;
    double worst_x = 0.0;
    double holds_to = 0.0;
    bool contiguous = true;
    for (double b : {1e-3, 1e-4, 1e-5, 1e-6}) {
        for (int k = 1; k <= 500; ++k) {
            const double x = 0.5 * k / 500.0;
            const double c = x / b;
            const double dev = std::abs(comb_sum_closed_form(1.0, b, c) / oracle::two_nearest(1.0, b, c) - 1.0);
            if (dev > worst) {
                worst = dev;
                worst_x = x;
            }
            if (b == 1e-3) {
                if (dev < 0.05 && contiguous) {
                    holds_to = x;
                } else {
                    contiguous = false;
                }
            }
        }
    }
    o.check(worst < 0.05, "closed form vs two nearest Lorentzians for b <= 1e-3, offsets x in (0, 1/2]: worst " +
                              fmt("%.3f", worst) + " at x = " + fmt("%.3f", worst_x) + " (< 5%)");
    o.info("agreement within 5% holds for x <= " + fmt("%.3f", holds_to) +
           "; at small b the full sum tends to a b^2 pi^2/sin^2(pi x), not a b^2 (1/x^2 + 1/(1-x)^2)");
    return o;
}

Outcome propagator_vs_ode() {
    Outcome o;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 10);
    double dev = 0.0;
    double fixed = 0.0;
    double semigroup = 0.0;
    const std::vector<double> times = log_spaced(1e-9, 20e-6, 20);
    for (int s = 0; s < 50; ++s) {
        QubitParams q;
        q.omega_q = units::ghz(6.0);
        q.gamma_q = 1.0 / log_uniform(rng, 1e-6, 100e-6);
        q.p_th = 0.1 * unit(rng);
        const int n = count(rng);
        std::vector<Tls> tls;
        oracle::OracleSystem ref{q.gamma_q, q.p_th, {}};
        for (int k = 0; k < n; ++k) {
            Tls t;
            t.delta = units::mhz(-5.0 + 10.0 * unit(rng));
            t.g = units::khz(log_uniform(rng, 10.0, 1000.0));
            t.gamma_t = 1.0 / log_uniform(rng, 100e-9, 100e-6);
            t.p = unit(rng);
            tls.push_back(t);
            ref.tls.push_back({t.delta, t.g, t.gamma_t});
        }
        const SolomonSystem sys(q, tls, unit(rng));
        const Propagator prop(sys);
        const Eigen::VectorXd p0 = sys.state();
        const Eigen::MatrixXd states = prop.propagate_many(p0, times);
        const auto expected = oracle::integrate(ref, std::vector<double>(p0.data(), p0.data() + p0.size()), times);
        for (std::size_t j = 0; j < times.size(); ++j) {
            for (int i = 0; i < p0.size(); ++i) dev = std::max(dev, std::abs(states(i, j) - expected[j][i]));
        }
        const Eigen::VectorXd thermal = Eigen::VectorXd::Constant(p0.size(), q.p_th);
        for (double t : times) {
            fixed = std::max(fixed, (prop.propagate(thermal, t) - thermal).cwiseAbs().maxCoeff());
        }
        for (double t1 : {3e-8, 1e-6, 7e-6}) {
            for (double t2 : {5e-8, 2e-6}) {
                const Eigen::VectorXd two = prop.propagate(prop.propagate(p0, t1), t2);
                semigroup = std::max(semigroup, (two - prop.propagate(p0, t1 + t2)).cwiseAbs().maxCoeff());
            }
        }
    }
    o.check(dev < 1e-8, "max deviation from adaptive Dormand-Prince reference " + fmt("%.2e", dev) + " (< 1e-8)");
    o.check(fixed < 1e-12, "thermal fixed point drift " + fmt("%.2e", fixed) + " (< 1e-12)");
    o.check(semigroup < 1e-10, "semigroup defect " + fmt("%.2e", semigroup) + " (< 1e-10)");
    return o;
}

// Sup-norm distance between the adiabatic biexponential and the exact flow
// for 100 resonant TLSs with gamma_t / gamma_1 = ratio.
double adiabatic_deviation(double ratio) {
    const int n = 100;
    const double gamma_t = 1.0 / 34e-6;
    const double gamma_1 = gamma_t / ratio;
    QubitParams q;
    q.omega_q = units::ghz(6.3);
    q.gamma_q = 0.0;
    q.p_th = 0.028;
    const double gamma_m = mutual_decoherence(q.gamma_q, gamma_t);
    const double g = std::sqrt(gamma_1 / n * gamma_m / 2.0);
    const double p_t0 = 0.3;
    std::vector<Tls> tls(n, Tls{0.0, g, gamma_t, p_t0});
    const SolomonSystem sys(q, tls, 1.0);
    std::vector<double> times{0.0};
    for (double t : log_spaced(1e-3 / gamma_1, 10.0 / gamma_t, 600)) times.push_back(t);
    const DecayTrace exact = sample_trace(sys, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double approx = biexp_solution(gamma_1, gamma_1 - q.gamma_q, gamma_t, 1.0, p_t0, q.p_th, times[i]);
        worst = std::max(worst, std::abs(approx - exact.p_q[i]));
    }
    return worst;
}

Outcome adiabatic_biexp() {
    Outcome o;
    const std::vector<double> ratios{1e-3, 5e-4, 2e-4, 1e-4};
    std::vector<double> devs;
    std::string listing;
    for (double r : ratios) {
        devs.push_back(adiabatic_deviation(r));
        listing += (listing.empty() ? "" : ", ") + fmt("%.0e", r) + ": " + fmt("%.3e", devs.back());
    }
    o.check(devs.front() < 0.01, "sup-norm deviation at ratio 1e-3 " + fmt("%.3e", devs.front()) + " (< 0.01)");
    bool monotone = true;
    for (std::size_t i = 1; i < devs.size(); ++i) monotone = monotone && devs[i] < devs[i - 1];
    o.check(monotone, "deviation decreases as the ratio goes to 1e-4 (" + listing + ")");
    return o;
}

// Plateau of the hole-burning protocol: p_eq after `pulses` burn pulses.
double holeburn_plateau(double gamma_t, int pulses) {
    QubitParams q;
    q.omega_q = units::ghz(6.3);
    q.gamma_q = 0.0;
    q.p_th = 0.028;
    const BathSpec bath = resonant_cluster(q.omega_q, 100, units::khz(50.0), gamma_t);
    HoleburnSpec spec;
    spec.omega_0 = q.omega_q - units::mhz(300.0);
    spec.omega_q = q.omega_q;
    spec.n_pulses = pulses;
    spec.tau_r = 1e-6;
    spec.plateau_delay = 5e-6;
    const std::vector<int> counts{pulses};
    return holeburn_saturation_curve(spec, bath, q, counts).y.back();
}

Outcome holeburn_steady_state() {
    Outcome o;
    const double gamma_t = 1.0 / 34e-6;
    const double target = steady_state_holeburn(100, gamma_t, 1e-6);
    const double in_gap = holeburn_plateau(gamma_t, 200);
    o.info("rate-balance target " + fmt("%.4f", target) + ", paper reports about 0.30");
    o.check(std::abs(in_gap / target - 1.0) < 0.2,
            "in-gap plateau after 200 pulses " + fmt("%.4f", in_gap) + " within 20% of the target");
    const double out_gap = holeburn_plateau(1.0 / 100e-9, 200);
    o.check(out_gap - 0.028 < 0.01, "out-of-gap plateau excess " + fmt("%.2e", out_gap - 0.028) + " (< 0.01)");
    return o;
}

// Sampling design for the round trips: dense enough that the statistical
// error of every rate under 1% noise sits near 1.5%, so the worst of 100
// seeds stays inside 5%.
std::vector<double> fit_grid(bool long_tail) {
    std::vector<double> t = log_spaced(10e-9, 5e-6, 400);
    for (double x : linear_spaced(5e-6, 200e-6, 2000)) {
        if (x > t.back()) t.push_back(x);
    }
    if (long_tail) {
        for (double x : linear_spaced(200e-6, 12e-3, 6000)) {
            if (x > t.back()) t.push_back(x);
        }
    }
    return t;
}

double max_rate_error(const FitResult& f, const TriexpModel& truth, bool tri) {
    double e = std::max(std::abs(f.params.gamma_1 / truth.gamma_1 - 1.0), std::abs(f.params.gamma_t / truth.gamma_t - 1.0));
    if (tri) e = std::max(e, std::abs(f.params.gamma_t_l / truth.gamma_t_l - 1.0));
    return e;
}

Outcome fit_round_trips() {
    Outcome o;
    const std::vector<TriexpModel> anchors{
        {0.6, 1.0 / 0.58e-6, 0.2, 1.0 / 33.2e-6, 0.1, 1.0 / 0.64e-3, 0.028},
        {0.6, 1.0 / 0.58e-6, 0.2, 1.0 / 44.6e-6, 0.1, 1.0 / 1.1e-3, 0.028},
    };
    double noiseless_bi = 0.0;
    double noiseless_tri = 0.0;
    double noisy_bi = 0.0;
    double noisy_tri = 0.0;
    int failures = 0;
    for (const auto& truth : anchors) {
        const auto bi_times = fit_grid(false);
        const auto tri_times = fit_grid(true);
        BiexpModel bi_truth = truth.biexp();
        bi_truth.c = truth.c;
        const DecayTrace bi = model_trace(bi_truth, bi_times);
        const DecayTrace tri = model_trace(truth, tri_times);
        noiseless_bi = std::max(noiseless_bi, max_rate_error(fit_biexp(bi), truth, false));
        noiseless_tri = std::max(noiseless_tri, max_rate_error(fit_triexp(tri), truth, true));
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(seed);
            const FitResult fb = fit_biexp(add_gaussian_noise(bi, 0.01, rng));
            const FitResult ft = fit_triexp(add_gaussian_noise(tri, 0.01, rng));
            const double eb = max_rate_error(fb, truth, false);
            const double et = max_rate_error(ft, truth, true);
            if (!fb.converged || !ft.converged || eb >= 0.05 || et >= 0.05) ++failures;
            noisy_bi = std::max(noisy_bi, eb);
            noisy_tri = std::max(noisy_tri, et);
        }
    }
    o.check(noiseless_bi < 1e-6 && noiseless_tri < 1e-6,
            "noiseless recovery: bi " + fmt("%.1e", noiseless_bi) + ", tri " + fmt("%.1e", noiseless_tri) + " (< 1e-6)");
    o.check(failures == 0, "1% noise, 100 seeds x 2 anchors: worst bi " + fmt("%.3f", noisy_bi) + ", tri " +
                               fmt("%.3f", noisy_tri) + ", " + std::to_string(failures) + " runs outside 5%");

    // Same burn, probe prepared in e or g.
    QubitParams q;
    q.omega_q = units::ghz(6.3);
    q.gamma_q = 1.0 / 20e-6;
    q.p_th = 0.028;
    const BathSpec bath = resonant_cluster(q.omega_q, 100, units::khz(5.0), 1.0 / 34e-6);
    HoleburnSpec spec;
    spec.omega_0 = q.omega_q - units::mhz(300.0);
    spec.omega_q = q.omega_q;
    spec.n_pulses = 200;
    spec.tau_r = 1e-6;
    spec.tau_d_grid = fit_grid(false);
    spec.probe_state = QubitState::e;
    const DecayTrace from_e = holeburn_trace(spec, bath, q);
    spec.probe_state = QubitState::g;
    const DecayTrace from_g = holeburn_trace(spec, bath, q);
    std::mt19937_64 rng(77);
    const FitResult fe = fit_biexp(add_gaussian_noise(from_e, 0.01, rng));
    const FitResult fg = fit_biexp(add_gaussian_noise(from_g, 0.01, rng));
    const double diff = std::abs(fe.params.gamma_t - fg.params.gamma_t);
    const double sigma = std::hypot(fe.std_error("gamma_t"), fg.std_error("gamma_t"));
    o.check(fe.converged && fg.converged && diff < 2.0 * sigma,
            "e- vs g-start Gamma_t: " + fmt("%.4g", fe.params.gamma_t) + " vs " + fmt("%.4g", fg.params.gamma_t) +
                " 1/s, difference " + fmt("%.3g", diff) + " < 2 sigma = " + fmt("%.3g", 2.0 * sigma));
    return o;
}

Outcome mergemon_scaling() {
    Outcome o;
    const MergemonGeometry geo = reference_mergemon();
    const double coefficient = mergemon_coefficient(geo);
    o.check(std::abs(coefficient / 1.425e6 - 1.0) < 0.1,
            "rho g^2 coefficient " + fmt("%.4g", coefficient) + " Hz vs 1.425e6 Hz (10%)");
    const double g = mergemon_coupling(geo);
    const double rho_per_ghz = mergemon_density(g, geo) * units::two_pi * 1e9;
    o.check(std::abs(units::to_hz(g) / 10e6 - 1.0) < 0.1, "g/2pi " + fmt("%.4g", units::to_hz(g) / 1e6) + " MHz vs 10 MHz (10%)");
    o.check(std::abs(rho_per_ghz / 0.35 - 1.0) < 0.1, "rho " + fmt("%.4g", rho_per_ghz) + " /GHz vs 0.35 /GHz (10%)");
    return o;
}

Outcome regime_map() {
    Outcome o;
    const MapSpec spec = MapSpec::defaults();
    const LifetimeMap map = lifetime_map(spec, 1);
    double fermi_spread = 0.0;
    double slope_worst = 0.0;
    int slopes = 0;
    for (std::size_t i = 0; i < map.n_g; ++i) {
        double lo = INFINITY;
        double hi = 0.0;
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t j = 0; j < map.n_gamma_t; ++j) {
            const MapCell& c = map.at(i, j);
            if (c.b > 3.0) {
                lo = std::min(lo, c.inv_gamma_1);
                hi = std::max(hi, c.inv_gamma_1);
            }
            if (c.b < 1e-3) {
                xs.push_back(std::log(1.0 / c.gamma_t));
                ys.push_back(std::log(c.inv_gamma_1));
            }
        }
        if (hi > 0.0) fermi_spread = std::max(fermi_spread, hi / lo - 1.0);
        if (xs.size() >= 2) {
            for (std::size_t k = 1; k < xs.size(); ++k) {
                const double slope = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
                slope_worst = std::max(slope_worst, std::abs(slope - 1.0));
            }
            ++slopes;
        }
    }
    o.check(fermi_spread < 1e-3, "Fermi cells (b > 3) vary by " + fmt("%.2e", fermi_spread) + " across Gamma_t (< 0.1%)");
    o.check(slopes > 0 && slope_worst < 0.01, "Purcell cells (b < 1e-3) log-log slope within " +
                                                   fmt("%.2e", slope_worst) + " of 1 over " +
                                                   std::to_string(slopes) + " coupling rows (< 0.01)");

    const MergemonGeometry geo = reference_mergemon();
    const double g = mergemon_coupling(geo);
    const double rho = mergemon_density(g, geo);
    const double anchor = comb_lifetime(g, 1.0 / 100e-9, rho, 0.0, {OffsetPolicy::fixed, 0.5});
    o.check(anchor > 100e-6 / 3.0 && anchor < 300e-6,
            "Mergemon anchor (1/Gamma_t = 100 ns, offset = spacing/2) " + fmt("%.0f", anchor * 1e6) +
                " us vs 100 us (factor 3)");
    o.info("same point with the offset averaged over the comb: " +
           fmt("%.0f", comb_lifetime(g, 1.0 / 100e-9, rho, 0.0, {OffsetPolicy::averaged, 0.5}) * 1e6) +
           " us; with 1/Gamma_t = 10 ns: " +
           fmt("%.0f", comb_lifetime(g, 1.0 / 10e-9, rho, 0.0, {OffsetPolicy::fixed, 0.5}) * 1e6) + " us");

    const Regime device = regime_classify(units::khz(50.0), 1.0 / 34e-6, units::per_mhz(20.0), 1.0 / 0.42e-6);
    o.check(device == Regime::fermi, "device point (g/2pi = 50 kHz, rho = 20 /MHz, T1 = 0.42 us) is " + to_string(device));
    const Regime merge = regime_classify(g, 1.0 / 100e-9, rho, 0.0);
    o.check(merge == Regime::purcell, "Mergemon point is " + to_string(merge));
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"tlsbath"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome performance() {
    Outcome o;
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    QubitParams q;
    q.omega_q = units::ghz(6.3);
    q.gamma_q = 1.0 / 100e-6;
    std::vector<Tls> tls;
    for (int k = 0; k < 1000; ++k) {
        tls.push_back({units::mhz(-50.0 + 100.0 * unit(rng)), units::khz(50.0), 1.0 / 34e-6, q.p_th});
    }
    const SolomonSystem sys(q, tls, 1.0);
    const auto times = linear_spaced(0.0, 100e-6, 1000);
    auto t0 = std::chrono::steady_clock::now();
    const DecayTrace trace = sample_trace(sys, times);
    const double prop_time = seconds_since(t0);
    o.check(prop_time < 5.0 && trace.size() == 1000,
            "1000-TLS exact propagation over 1000 times: " + fmt("%.2f", prop_time) + " s (< 5 s, one thread)");

    t0 = std::chrono::steady_clock::now();
    const LifetimeMap map = lifetime_map(MapSpec::defaults(), 8);
    const double map_time = seconds_since(t0);
    o.check(map_time < 60.0 && map.cells.size() == 10000,
            "default 100 x 100 map on 8 workers: " + fmt("%.2f", map_time) + " s (< 60 s)");

    const fs::path dir = fs::temp_directory_path() / "tlsbath_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "scan.yaml");
        cfg << "seed: 11\n"
               "qubit: {frequency: 6.3 GHz, intrinsic_decay: 20 us}\n"
               "bath:\n"
               "  combs: [{anchor: 6.3 GHz, spacing: 2 MHz, half_width: 40, coupling: 50 kHz, decay: 34 us}]\n"
               "sequence:\n"
               "  prepare_frequency: 6.25 GHz\n"
               "  pulses: 20\n"
               "  delays: {start: 10 ns, stop: 50 us, count: 30, spacing: log}\n"
               "  scan: {start: 6.28 GHz, stop: 6.32 GHz, count: 9}\n"
               "simulate: {noise: 0.01}\n";
    }
    bool same = true;
    std::string detail;
    for (const std::string cmd : {"map", "simulate"}) {
        std::vector<std::string> base{cmd};
        if (cmd == "simulate") base.insert(base.end(), {"--config", (dir / "scan.yaml").string()});
        std::vector<std::string> names;
        std::vector<std::string> contents;
        for (const std::string threads : {"1", "8"}) {
            const fs::path out = dir / (cmd + "_" + threads);
            auto args = base;
            args.insert(args.end(), {"--out", out.string(), "--threads", threads});
            if (cli(args) != 0) {
                same = false;
                detail += cmd + " failed; ";
                continue;
            }
            std::string all;
            for (const auto& entry : fs::directory_iterator(out)) all += entry.path().filename().string() + slurp(entry.path());
            contents.push_back(all);
        }
        same = same && contents.size() == 2 && contents[0] == contents[1];
    }
    fs::remove_all(dir);
    o.check(same, "map and relaxation-scan outputs byte-identical for 1 and 8 workers " + detail);
    return o;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "closed-form comb sum vs direct sum", closed_form_vs_direct},
        {2, "Fermi asymptote", fermi_asymptote},
        {3, "Purcell asymptote", purcell_asymptote},
        {4, "exact propagator vs ODE reference", propagator_vs_ode},
        {5, "adiabatic biexponential vs exact dynamics", adiabatic_biexp},
        {6, "hole-burning steady state", holeburn_steady_state},
        {7, "fit round trips at anchor parameters", fit_round_trips},
        {8, "Mergemon scaling", mergemon_scaling},
        {9, "regime map", regime_map},
        {10, "performance and determinism", performance},
    };
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    bool ok = true;
    for (const auto& c : all) {
        if (only != 0 && c.id != only) continue;
        Outcome r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.check(false, std::string("threw: ") + e.what());
        }
        ok = ok && r.pass;
        std::cout << "criterion " << c.id << ": " << (r.pass ? "PASS" : "FAIL") << " (" << c.title << ")\n";
        for (const auto& n : r.notes) std::cout << "    " << n << "\n";
        std::cout.flush();
    }
    return ok ? 0 : 1;
}
