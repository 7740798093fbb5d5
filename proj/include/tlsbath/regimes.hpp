#pragma once

// Qubit lifetime over the (coupling, TLS lifetime) plane for a uniform TLS
// comb, regime labels, and the frequency-dependent lifetime model across a
// phononic band edge.

#include <cstddef>
#include <string>
#include <vector>

#include "tlsbath/model.hpp"
#include "tlsbath/sequence.hpp"

namespace tlsbath {

enum class Regime { fermi, purcell, crossover };

std::string to_string(Regime regime);

/// b = gamma_m / spacing with spacing = 1/rho and gamma_m = (gamma_q + gamma_t)/2:
/// fermi for b > 1, purcell for b < 0.01, crossover otherwise.
Regime regime_classify(double g, double gamma_t, double rho, double gamma_q = 0.0);

/// How the comb offset enters a lifetime.
enum class OffsetPolicy {
    fixed,     // offset = offset_fraction * spacing
    averaged,  // 1/Gamma_1 averaged uniformly over offsets in [0, spacing/2]
};

std::string to_string(OffsetPolicy policy);
OffsetPolicy parse_offset_policy(const std::string& text);

struct CombLifetimeOptions {
    OffsetPolicy policy = OffsetPolicy::fixed;
    double offset_fraction = 0.5;
};

/// 1/Gamma_1 for a comb of density rho (per rad/s) with uniform g and
/// gamma_t, on top of intrinsic decay gamma_q.
double comb_lifetime(double g, double gamma_t, double rho, double gamma_q, const CombLifetimeOptions& options);

enum class DensityLaw {
    fixed,     // rho independent of g
    mergemon,  // rho = coefficient / g^2 from a Mergemon geometry
};

std::string to_string(DensityLaw law);
DensityLaw parse_density_law(const std::string& text);

struct MapSpec {
    std::vector<double> g_grid;        // rad/s
    std::vector<double> gamma_t_grid;  // 1/s
    DensityLaw density_law = DensityLaw::fixed;
    double rho = 0.0;                  // per rad/s, for the fixed law
    MergemonGeometry geometry;         // for the mergemon law
    CombLifetimeOptions offset;
    double gamma_q = 0.0;

    void validate() const;

    /// 100 x 100 log grid, g/2pi in [10 kHz, 100 MHz], 1/gamma_t in
    /// [10 ns, 10 ms], rho = 20 /MHz.
    static MapSpec defaults();

    double density(double g) const;
};

struct MapCell {
    double g = 0.0;
    double gamma_t = 0.0;
    double rho = 0.0;
    double b = 0.0;
    double inv_gamma_1 = 0.0;
    Regime regime = Regime::crossover;
};

/// Row-major over g (outer) and gamma_t (inner).
struct LifetimeMap {
    std::size_t n_g = 0;
    std::size_t n_gamma_t = 0;
    std::vector<MapCell> cells;

    const MapCell& at(std::size_t i_g, std::size_t i_t) const { return cells[i_g * n_gamma_t + i_t]; }
};

/// Cells are independent; `threads` only changes wall time.
LifetimeMap lifetime_map(const MapSpec& spec, unsigned threads = 1);

enum class CouplingLaw {
    quadratic,  // g/2pi [Hz] = coefficient * omega^2
    sqrt,       // g/2pi [Hz] = coefficient * sqrt(omega)
};

std::string to_string(CouplingLaw law);
CouplingLaw parse_coupling_law(const std::string& text);

struct FreqModelSpec {
    std::vector<double> omega_grid;  // rad/s
    BandGapProfile profile;          // gamma_t(omega)
    CouplingLaw coupling_law = CouplingLaw::quadratic;
    double coupling_coefficient = 0.0;
    double rho = 0.0;  // per rad/s
    QubitParams qubit;  // readout parameters; gamma_q is not used
    CombLifetimeOptions offset;

    void validate() const;
    double coupling(double omega) const;

    /// 4.5-6.5 GHz in 201 points, edge 5.2 GHz, 34 us inside, 100 ns
    /// outside, g/2pi = 5e-17 Hz * omega^2, rho = 20 /MHz, readout at
    /// 7.1 GHz with g_r/2pi = 48 MHz and kappa_r/2pi = 2 MHz.
    static FreqModelSpec defaults();
};

/// Coefficient of the sqrt law that matches the quadratic law at omega.
double sqrt_coefficient_matching(double quadratic_coefficient, double omega);

struct FreqModelRow {
    double omega = 0.0;
    double g = 0.0;
    double gamma_t = 0.0;
    double gamma_readout = 0.0;
    double inv_gamma_1 = 0.0;
};

std::vector<FreqModelRow> frequency_model(const FreqModelSpec& spec);

/// 1/Gamma_1 at omega with the TLS lifetime forced to gamma_t.
double frequency_model_lifetime(const FreqModelSpec& spec, double omega, double gamma_t);

}  // namespace tlsbath
