#include "tlsbath/model.hpp"

#include <cmath>
#include <string>

#include "tlsbath/errors.hpp"
#include "tlsbath/units.hpp"

namespace tlsbath {

namespace {

// Neumaier-compensated accumulator; the materialised comb adds 2e4 terms of
// very different magnitude.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

void QubitParams::validate() const {
    require(std::isfinite(omega_q) && omega_q > 0.0, "qubit frequency must be positive");
    require(gamma_q >= 0.0, "qubit decay rate must be non-negative");
    require(p_th >= 0.0 && p_th < 0.5, "thermal population must lie in [0, 0.5)");
    require(kappa_r >= 0.0, "resonator linewidth must be non-negative");
    require(g_r >= 0.0, "readout coupling must be non-negative");
    require(omega_r >= 0.0, "resonator frequency must be non-negative");
}

void Tls::validate() const {
    require(g >= 0.0, "TLS coupling must be non-negative");
    require(gamma_t >= 0.0, "TLS decay rate must be non-negative");
    require(p >= 0.0 && p <= 1.0, "TLS population must lie in [0, 1]");
    require(std::isfinite(delta), "TLS detuning must be finite");
}

void UniformComb::validate() const {
    require(spacing > 0.0, "comb spacing must be positive");
    require(offset >= 0.0 && offset <= 0.5 * spacing, "comb offset must lie in [0, spacing/2]");
    require(g >= 0.0, "comb coupling must be non-negative");
    require(gamma_t >= 0.0, "comb TLS decay rate must be non-negative");
    require(truncation >= 0, "comb truncation must be non-negative");
}

void MergemonGeometry::validate() const {
    require(area > 0.0 && thickness > 0.0 && rho0 > 0.0 && dipole > 0.0 && permittivity > 0.0 &&
                capacitance > 0.0 && v_zpf > 0.0,
            "all Mergemon geometry fields must be positive");
}

double MergemonGeometry::zero_point_voltage(double omega, double capacitance) {
    require(omega > 0.0 && capacitance > 0.0, "zero-point voltage needs positive omega and C");
    return std::sqrt(units::hbar * omega / (2.0 * capacitance));
}

MergemonGeometry reference_mergemon() {
    MergemonGeometry geo;
    geo.area = 1.4e-12;
    geo.thickness = 2e-9;
    geo.rho0 = 100.0 * 1e18 * 1e-9;  // 100 per um^3 per GHz
    geo.dipole = 0.2 * units::elementary_charge * 1e-10;
    geo.permittivity = 10.0 * units::vacuum_permittivity;
    geo.capacitance = 70e-15;
    geo.v_zpf = MergemonGeometry::zero_point_voltage(units::ghz(3.8), geo.capacitance);
    return geo;
}

double purcell_rate(double g, double gamma_m, double delta) {
    if (!(gamma_m > 0.0)) {
        throw DomainError("purcell_rate: mutual decoherence rate must be positive");
    }
    return 2.0 * g * g * gamma_m / (gamma_m * gamma_m + delta * delta);
}

double mutual_decoherence(double gamma_q, double gamma_t) {
    return 0.5 * (gamma_q + gamma_t);
}

double total_decay_rate(const QubitParams& qubit, std::span<const Tls> tls) {
    CompensatedSum sum;
    for (const Tls& t : tls) {
        if (t.g == 0.0) continue;
        sum.add(purcell_rate(t.g, mutual_decoherence(qubit.gamma_q, t.gamma_t), t.delta));
    }
    return qubit.gamma_q + sum.value();
}

double total_decay_rate(const QubitParams& qubit, const TlsEnsemble& bath) {
    if (const auto* list = std::get_if<std::vector<Tls>>(&bath)) {
        return total_decay_rate(qubit, std::span<const Tls>(*list));
    }
    const auto& comb = std::get<UniformComb>(bath);
    comb.validate();
    return total_decay_rate(qubit, std::span<const Tls>(materialize(comb)));
}

std::vector<Tls> materialize(const UniformComb& comb, double p) {
    comb.validate();
    std::vector<Tls> out;
    out.reserve(2 * static_cast<std::size_t>(comb.truncation) + 1);
    // Outermost first so that summing in list order adds small terms first.
    for (int k = comb.truncation; k >= 1; --k) {
        out.push_back({static_cast<double>(k) * comb.spacing - comb.offset, comb.g, comb.gamma_t, p});
        out.push_back({-static_cast<double>(k) * comb.spacing - comb.offset, comb.g, comb.gamma_t, p});
    }
    out.push_back({-comb.offset, comb.g, comb.gamma_t, p});
    return out;
}

CombParameters comb_parameters(double g, double gamma_m, double spacing, double offset) {
    require(gamma_m > 0.0, "comb_parameters: mutual decoherence rate must be positive");
    require(spacing > 0.0, "comb_parameters: spacing must be positive");
    return {2.0 * g * g / gamma_m, gamma_m / spacing, offset / gamma_m};
}

double comb_sum_closed_form(double a, double b, double c) {
    if (!(b > 0.0)) throw DomainError("comb_sum_closed_form: b must be positive");
    if (!(a >= 0.0)) throw DomainError("comb_sum_closed_form: a must be non-negative");
    // sinh(x) / (cosh(x) - cos(y)) with x = 2 pi b, y = 2 pi b c, rewritten as
    // (1 - e^-2x) / ((1 - e^-x)^2 + 4 e^-x sin^2(y/2)).
    const double x = units::two_pi * b;
    // Reduce b*c modulo 1 before forming the angle; the sum is periodic in it.
    const double bc = b * c;
    const double frac = bc - std::round(bc);
    const double half_angle = units::pi * frac;
    const double em = std::exp(-x);
    const double num = -std::expm1(-2.0 * x);
    const double s = std::sin(half_angle);
    const double e1 = std::expm1(-x);
    const double den = e1 * e1 + 4.0 * em * s * s;
    return units::pi * a * b * num / den;
}

double comb_decay_rate(const QubitParams& qubit, const UniformComb& comb) {
    comb.validate();
    if (comb.g == 0.0) return qubit.gamma_q;
    const double gamma_m = mutual_decoherence(qubit.gamma_q, comb.gamma_t);
    const auto p = comb_parameters(comb.g, gamma_m, comb.spacing, comb.offset);
    return qubit.gamma_q + comb_sum_closed_form(p.a, p.b, p.c);
}

double comb_truncation_bound(double a, double b, double c, int truncation) {
    const double shift = std::abs(b * c);
    const double h = static_cast<double>(truncation);
    require(h > shift, "comb_truncation_bound: truncation must exceed |bc|");
    return 2.0 * a * b * b / (h - shift);
}

double fermi_rate(double g, double rho) {
    return units::two_pi * g * g * rho;
}

double purcell_limit_rate(double g, double delta_0, double gamma_t) {
    if (delta_0 == 0.0) {
        throw DomainError("purcell_limit_rate: zero detuning; use purcell_rate for resonant TLSs");
    }
    const double r = g / delta_0;
    return r * r * gamma_t;
}

double readout_purcell(const QubitParams& qubit, double omega) {
    const double detuning = qubit.omega_r - omega;
    if (detuning == 0.0) throw DomainError("readout_purcell: qubit resonant with readout resonator");
    const double r = qubit.g_r / detuning;
    return r * r * qubit.kappa_r;
}

double mergemon_coefficient(const MergemonGeometry& geometry) {
    geometry.validate();
    const double p = geometry.dipole;
    const double v = geometry.v_zpf;
    return geometry.rho0 * geometry.capacitance * v * v * p * p /
           (geometry.permittivity * units::hbar * units::hbar);
}

double mergemon_density(double g, const MergemonGeometry& geometry) {
    require(g > 0.0, "mergemon_density: coupling must be positive");
    return units::density_from_per_hz(mergemon_coefficient(geometry) / (g * g));
}

double mergemon_coupling(const MergemonGeometry& geometry) {
    geometry.validate();
    const double field = geometry.v_zpf / geometry.thickness;
    return geometry.dipole * field / units::hbar;
}

TransmonSpec transmon_derive(double omega_q, double alpha, double chi, double omega_r, double lamb) {
    require(alpha < 0.0, "transmon_derive: anharmonicity must be negative");
    require(omega_q > 0.0, "transmon_derive: qubit frequency must be positive");
    require(omega_q != omega_r, "transmon_derive: qubit and resonator frequencies coincide");

    TransmonSpec spec;
    spec.alpha = alpha;
    spec.chi = chi;
    spec.lamb = lamb;

    // hbar w_q = sqrt(8 E_J E_C) - E_C with E_C = -hbar alpha, all in Hz.
    const double fq = units::to_hz(omega_q);
    const double ec = -units::to_hz(alpha);
    spec.ec_over_h = ec;
    spec.ej_over_h = (fq + ec) * (fq + ec) / (8.0 * ec);
    spec.transmon_regime = spec.ej_over_h / spec.ec_over_h >= 20.0;

    const double detuning = omega_q - omega_r;
    const double radicand = -detuning * chi * (1.0 + detuning / alpha);
    require(radicand >= 0.0, "transmon_derive: dispersive relation gives imaginary coupling");
    spec.g_r = std::sqrt(radicand);
    spec.g_r_lamb = lamb == 0.0 ? 0.0 : std::sqrt(std::abs(lamb * detuning));

    spec.z_t = units::flux_quantum / (units::pi * units::elementary_charge) *
               std::sqrt(spec.ec_over_h / (2.0 * spec.ej_over_h));
    spec.v_zpf = omega_q * std::sqrt(units::hbar * spec.z_t / 2.0);
    return spec;
}

}  // namespace tlsbath
