#pragma once

// Closed-form rate formulas for a qubit coupled incoherently to a bath of
// two-level systems (TLSs): per-TLS Purcell exchange rates, the total qubit
// decay, the uniform-comb sum and its Fermi/Purcell asymptotes, Mergemon
// density scaling and transmon parameter relations.
//
// All frequencies and couplings are angular (rad/s), rates are 1/s and
// densities are per rad/s unless a name says otherwise (`_hz`, `per_hz`).

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace tlsbath {

struct QubitParams {
    double omega_q = 0.0;  // qubit frequency
    double gamma_q = 0.0;  // intrinsic (non-TLS) decay rate
    double p_th = 0.028;   // thermal excited-state population
    double omega_r = 0.0;  // readout resonator frequency
    double kappa_r = 0.0;  // resonator linewidth
    double g_r = 0.0;      // qubit-resonator coupling

    /// Throws DomainError when a field breaks its invariant.
    void validate() const;
};

struct Tls {
    double delta = 0.0;    // detuning from the qubit, signed
    double g = 0.0;        // transverse coupling
    double gamma_t = 0.0;  // intrinsic relaxation rate
    double p = 0.0;        // excited population

    void validate() const;
};

/// TLSs equally spaced by `spacing`, the comb shifted by `offset` relative to
/// the qubit: detunings k*spacing - offset for integer k.
struct UniformComb {
    double spacing = 0.0;
    double offset = 0.0;  // 0 <= offset <= spacing / 2
    double g = 0.0;
    double gamma_t = 0.0;
    int truncation = 10000;  // |k| <= truncation when materialised

    double density() const { return 1.0 / spacing; }
    void validate() const;
};

using TlsEnsemble = std::variant<std::vector<Tls>, UniformComb>;

struct TransmonSpec {
    double ej_over_h = 0.0;  // Hz
    double ec_over_h = 0.0;  // Hz
    double alpha = 0.0;      // anharmonicity, negative
    double chi = 0.0;        // dispersive shift
    double lamb = 0.0;       // Lamb shift (0 when not supplied)
    double g_r = 0.0;        // qubit-resonator coupling from the dispersive relation
    double g_r_lamb = 0.0;   // same coupling from the Lamb shift, 0 if lamb == 0
    double z_t = 0.0;        // transmon impedance, ohm
    double v_zpf = 0.0;      // zero-point voltage, V
    bool transmon_regime = true;  // false when E_J / E_C < 20
};

/// Parallel-plate merged-element transmon. SI units throughout.
struct MergemonGeometry {
    double area = 0.0;          // m^2
    double thickness = 0.0;     // m
    double rho0 = 0.0;          // TLS density per volume per Hz, 1/(m^3 Hz)
    double dipole = 0.0;        // C m
    double permittivity = 0.0;  // F/m
    double capacitance = 0.0;   // F
    double v_zpf = 0.0;         // V

    void validate() const;

    /// Zero-point voltage of an LC mode, sqrt(hbar * omega / (2 C)).
    static double zero_point_voltage(double omega, double capacitance);
};

/// Al/AlOx/Al Mergemon reference: 70 fF, 3.8 GHz, eps = 10 eps0,
/// rho0 = 100 /um^3/GHz, p = 0.2 e*Angstrom, A = 1.4 um^2, d = 2 nm.
/// V_zpf is derived from the capacitance and frequency.
MergemonGeometry reference_mergemon();

// ---------------------------------------------------------------------------
// Per-TLS rates

/// Incoherent exchange rate 2 g^2 gamma_m / (gamma_m^2 + delta^2).
/// Throws DomainError for gamma_m <= 0.
double purcell_rate(double g, double gamma_m, double delta);

/// (gamma_q + gamma_t) / 2.
double mutual_decoherence(double gamma_q, double gamma_t);

/// Gamma_q plus the Purcell sum over an explicit TLS list.
double total_decay_rate(const QubitParams& qubit, std::span<const Tls> tls);

/// Same for an ensemble; a comb is materialised (|k| <= truncation) and summed
/// term by term. Use `comb_decay_rate` for the closed form.
double total_decay_rate(const QubitParams& qubit, const TlsEnsemble& bath);

/// Explicit TLS list for a comb, all with population `p`.
std::vector<Tls> materialize(const UniformComb& comb, double p = 0.0);

// ---------------------------------------------------------------------------
// Uniform comb

/// Dimensionless comb parameters: a = 2g^2/gamma_m, b = gamma_m/spacing,
/// c = offset/gamma_m.
struct CombParameters {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

CombParameters comb_parameters(double g, double gamma_m, double spacing, double offset);

/// Closed form of sum_h a b^2 / (b^2 + (h - bc)^2) over all integers h:
/// pi a b sinh(2 pi b) / (cosh(2 pi b) - cos(2 pi b c)). Evaluated in a form
/// that neither overflows for large b nor cancels for small b.
/// Throws DomainError for b <= 0 or a < 0.
double comb_sum_closed_form(double a, double b, double c);

/// Qubit decay from a comb using the closed form: gamma_q + comb sum with
/// gamma_m = (gamma_q + comb.gamma_t) / 2.
double comb_decay_rate(const QubitParams& qubit, const UniformComb& comb);

/// Upper bound on the part of the comb sum dropped by truncating at |h| <= H:
/// 2 a b^2 / (H - |bc|).
double comb_truncation_bound(double a, double b, double c, int truncation);

/// Dense-bath (Fermi golden rule) rate 2 pi g^2 rho, rho per rad/s.
double fermi_rate(double g, double rho);

/// Sparse-bath Purcell formula (g/delta_0)^2 gamma_t for the nearest TLS.
/// Throws DomainError for delta_0 == 0.
double purcell_limit_rate(double g, double delta_0, double gamma_t);

/// Readout-resonator Purcell decay (g_r / (omega_r - omega))^2 kappa_r.
/// Throws DomainError at resonance.
double readout_purcell(const QubitParams& qubit, double omega);

// ---------------------------------------------------------------------------
// Mergemon and transmon relations

/// rho * g^2 in Hz, from rho0 C V_zpf^2 p^2 / (eps hbar^2); rho per Hz and g
/// in rad/s.
double mergemon_coefficient(const MergemonGeometry& geometry);

/// TLS density (per rad/s) at coupling g for a Mergemon of fixed capacitance.
double mergemon_density(double g, const MergemonGeometry& geometry);

/// Coupling p E / hbar with E = V_zpf / d.
double mergemon_coupling(const MergemonGeometry& geometry);

/// Transmon parameters from measured spectra. `lamb` is optional (0 = unknown).
/// Throws DomainError for alpha >= 0 or omega_q == omega_r.
TransmonSpec transmon_derive(double omega_q, double alpha, double chi, double omega_r,
                             double lamb = 0.0);

}  // namespace tlsbath
