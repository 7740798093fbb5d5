#include "tlsbath/regimes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tlsbath/errors.hpp"
#include "tlsbath/fitting.hpp"
#include "tlsbath/units.hpp"

namespace tlsbath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw ArgumentError(std::string(name) + " is empty");
    for (double v : grid) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::fermi: return "fermi";
        case Regime::purcell: return "purcell";
        default: return "crossover";
    }
}

Regime regime_classify(double g, double gamma_t, double rho, double gamma_q) {
    if (!(g >= 0.0)) throw DomainError("regime_classify: coupling must be non-negative");
    if (!(rho > 0.0)) throw DomainError("regime_classify: density must be positive");
    if (!(gamma_t >= 0.0 && gamma_q >= 0.0)) throw DomainError("regime_classify: rates must be non-negative");
    const double b = mutual_decoherence(gamma_q, gamma_t) * rho;
    if (b > 1.0) return Regime::fermi;
    if (b < 0.01) return Regime::purcell;
    return Regime::crossover;
}

std::string to_string(OffsetPolicy policy) { return policy == OffsetPolicy::fixed ? "fixed" : "averaged"; }

OffsetPolicy parse_offset_policy(const std::string& text) {
    if (text == "fixed" || text == "midpoint") return OffsetPolicy::fixed;
    if (text == "averaged") return OffsetPolicy::averaged;
    throw ArgumentError("offset policy must be 'fixed' or 'averaged', got '" + text + "'");
}

double comb_lifetime(double g, double gamma_t, double rho, double gamma_q, const CombLifetimeOptions& options) {
    if (!(rho >= 0.0)) throw DomainError("comb_lifetime: density must be non-negative");
    if (!(options.offset_fraction >= 0.0 && options.offset_fraction <= 0.5)) {
        throw DomainError("comb_lifetime: offset fraction must lie in [0, 1/2]");
    }
    if (g == 0.0 || rho == 0.0) return gamma_q > 0.0 ? 1.0 / gamma_q : kInf;

    const double spacing = 1.0 / rho;
    const double gamma_m = mutual_decoherence(gamma_q, gamma_t);
    const auto p = comb_parameters(g, gamma_m, spacing, options.offset_fraction * spacing);
    if (options.policy == OffsetPolicy::fixed) return 1.0 / (gamma_q + comb_sum_closed_form(p.a, p.b, p.c));

    // x = b c = offset / spacing runs over [0, 1/2].
    auto lifetime = [&](double x) { return 1.0 / (gamma_q + comb_sum_closed_form(p.a, p.b, x / p.b)); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(lifetime, 0.0, 0.5, 15, 1e-12);
    return 2.0 * integral;
}

std::string to_string(DensityLaw law) { return law == DensityLaw::fixed ? "fixed" : "mergemon"; }

DensityLaw parse_density_law(const std::string& text) {
    if (text == "fixed") return DensityLaw::fixed;
    if (text == "mergemon") return DensityLaw::mergemon;
    throw ArgumentError("density law must be 'fixed' or 'mergemon', got '" + text + "'");
}

void MapSpec::validate() const {
    require_grid(g_grid, "map g grid");
    require_grid(gamma_t_grid, "map gamma_t grid");
    if (density_law == DensityLaw::fixed && !(rho > 0.0)) throw DomainError("map density must be positive");
    if (density_law == DensityLaw::mergemon) geometry.validate();
    if (!(gamma_q >= 0.0)) throw DomainError("map gamma_q must be non-negative");
    if (!(offset.offset_fraction >= 0.0 && offset.offset_fraction <= 0.5)) {
        throw DomainError("map offset fraction must lie in [0, 1/2]");
    }
}

MapSpec MapSpec::defaults() {
    MapSpec spec;
    spec.g_grid = log_spaced(units::khz(10.0), units::mhz(100.0), 100);
    for (double lifetime : log_spaced(10e-9, 10e-3, 100)) spec.gamma_t_grid.push_back(1.0 / lifetime);
    spec.rho = units::per_mhz(20.0);
    spec.geometry = reference_mergemon();
    return spec;
}

double MapSpec::density(double g) const {
    return density_law == DensityLaw::fixed ? rho : mergemon_density(g, geometry);
}

LifetimeMap lifetime_map(const MapSpec& spec, unsigned threads) {
    spec.validate();
    LifetimeMap map;
    map.n_g = spec.g_grid.size();
    map.n_gamma_t = spec.gamma_t_grid.size();
    map.cells.resize(map.n_g * map.n_gamma_t);

    auto row = [&](std::size_t i) {
        const double g = spec.g_grid[i];
        const double rho = spec.density(g);
        for (std::size_t j = 0; j < map.n_gamma_t; ++j) {
            const double gamma_t = spec.gamma_t_grid[j];
            MapCell& cell = map.cells[i * map.n_gamma_t + j];
            cell.g = g;
            cell.gamma_t = gamma_t;
            cell.rho = rho;
            cell.b = mutual_decoherence(spec.gamma_q, gamma_t) * rho;
            cell.inv_gamma_1 = comb_lifetime(g, gamma_t, rho, spec.gamma_q, spec.offset);
            cell.regime = regime_classify(g, gamma_t, rho, spec.gamma_q);
        }
    };

    if (threads <= 1 || map.n_g == 1) {
        for (std::size_t i = 0; i < map.n_g; ++i) row(i);
        return map;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < map.n_g; i = next++) row(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return map;
}

std::string to_string(CouplingLaw law) { return law == CouplingLaw::quadratic ? "quadratic" : "sqrt"; }

CouplingLaw parse_coupling_law(const std::string& text) {
    if (text == "quadratic") return CouplingLaw::quadratic;
    if (text == "sqrt") return CouplingLaw::sqrt;
    throw ArgumentError("coupling law must be 'quadratic' or 'sqrt', got '" + text + "'");
}

void FreqModelSpec::validate() const {
    require_grid(omega_grid, "frequency grid");
    const auto [lo, hi] = std::minmax_element(omega_grid.begin(), omega_grid.end());
    if (!(profile.edge >= *lo && profile.edge <= *hi)) {
        throw DomainError("band edge lies outside the frequency grid");
    }
    if (!(profile.gamma_inside >= 0.0 && profile.gamma_outside >= 0.0)) {
        throw DomainError("TLS decay rates must be non-negative");
    }
    if (!(coupling_coefficient >= 0.0)) throw DomainError("coupling coefficient must be non-negative");
    if (!(rho >= 0.0)) throw DomainError("density must be non-negative");
    for (double w : omega_grid) {
        if (w == qubit.omega_r) throw DomainError("frequency grid hits the readout resonance");
    }
}

double FreqModelSpec::coupling(double omega) const {
    const double per_hz = coupling_law == CouplingLaw::quadratic ? coupling_coefficient * omega * omega
                                                                 : coupling_coefficient * std::sqrt(omega);
    return units::angular(per_hz);
}

FreqModelSpec FreqModelSpec::defaults() {
    FreqModelSpec spec;
    spec.omega_grid = linear_spaced(units::ghz(4.5), units::ghz(6.5), 201);
    spec.profile = BandGapProfile{units::ghz(5.2), 1.0 / 34e-6, 1.0 / 100e-9};
    spec.coupling_coefficient = 5e-17;
    spec.rho = units::per_mhz(20.0);
    spec.qubit.omega_q = units::ghz(5.2);
    spec.qubit.omega_r = units::ghz(7.1);
    spec.qubit.kappa_r = units::mhz(2.0);
    spec.qubit.g_r = units::mhz(48.0);
    return spec;
}

double sqrt_coefficient_matching(double quadratic_coefficient, double omega) {
    return quadratic_coefficient * omega * std::sqrt(omega);
}

double frequency_model_lifetime(const FreqModelSpec& spec, double omega, double gamma_t) {
    const double gamma_readout = readout_purcell(spec.qubit, omega);
    return comb_lifetime(spec.coupling(omega), gamma_t, spec.rho, gamma_readout, spec.offset);
}

std::vector<FreqModelRow> frequency_model(const FreqModelSpec& spec) {
    spec.validate();
    std::vector<FreqModelRow> rows;
    rows.reserve(spec.omega_grid.size());
    for (double w : spec.omega_grid) {
        FreqModelRow row;
        row.omega = w;
        row.g = spec.coupling(w);
        row.gamma_t = spec.profile(w);
        row.gamma_readout = readout_purcell(spec.qubit, w);
        row.inv_gamma_1 = frequency_model_lifetime(spec, w, row.gamma_t);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tlsbath
