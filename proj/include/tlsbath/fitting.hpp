#pragma once

// Multi-exponential least squares for qubit relaxation traces:
//
//   biexp:  a e^{-G1 t} + b e^{-Gt t} + c
//   triexp: a e^{-G1 t} + b e^{-Gt t} + b_l e^{-Gl t} + c
//
// Rates are fitted as ln G so they stay positive. Minimisation uses the
// MINPACK-style Levenberg-Marquardt in Eigen's unsupported module.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tlsbath/dynamics.hpp"

namespace tlsbath {

enum class ModelKind { biexp, triexp };

enum class Weighting {
    uniform,
    variance,  // 1 / population_std^2; requires p_q_std
};

enum class Initialization {
    peel_off,   // single-exponential fits on the tail, middle and head
    rate_grid,  // best linear fit over a log-spaced grid of rate tuples
};

std::string to_string(ModelKind kind);
std::string to_string(Weighting weighting);
std::string to_string(Initialization init);
ModelKind parse_model_kind(const std::string& text);
Weighting parse_weighting(const std::string& text);
Initialization parse_initialization(const std::string& text);

struct FitOptions {
    Weighting weighting = Weighting::uniform;
    Initialization initialization = Initialization::peel_off;
    bool multi_start = true;  // also start from the other initialization, keep the lower cost
    int max_evaluations = 4000;
    double degeneracy_tolerance = 0.05;  // rates closer than this (relative) are merged
    double residual_threshold = 5e-3;    // rms above this sets high_residual
};

struct FitResult {
    ModelKind model = ModelKind::biexp;
    TriexpModel params;               // b_l = gamma_t_l = 0 for biexp fits
    std::vector<double> std_errors;   // ordered as parameter_names(model)
    double residual_rms = 0.0;
    bool converged = false;
    int n_iterations = 0;
    bool degenerate = false;     // a component merged with another or dropped as empty
    bool high_residual = false;  // residual_rms above the threshold
    Initialization initialization = Initialization::peel_off;
    std::string status;

    BiexpModel biexp() const { return params.biexp(); }
    const TriexpModel& triexp() const { return params; }
    double operator()(double t) const { return params(t); }

    /// Standard error for a named parameter ("a", "gamma_1", ...).
    double std_error(const std::string& name) const;
};

/// "a", "gamma_1", "b", "gamma_t", ["b_l", "gamma_t_l",] "c".
std::vector<std::string> parameter_names(ModelKind kind);

/// Throws ArgumentError for non-finite samples or too few of them, FitError
/// for a constant trace. Samples need not be sorted.
FitResult fit_biexp(const DecayTrace& trace, std::optional<BiexpModel> init = std::nullopt,
                    const FitOptions& options = {});
FitResult fit_triexp(const DecayTrace& trace, std::optional<TriexpModel> init = std::nullopt,
                     const FitOptions& options = {});
FitResult fit_model(ModelKind kind, const DecayTrace& trace, const FitOptions& options = {});

/// TLS-induced qubit decay b G1 / (p_t0 - p_th), inverting the slow amplitude
/// of the adiabatic solution. p_th defaults to the fitted offset c. Throws
/// DomainError if p_t0 <= p_th.
double gamma_q_tls_estimate(const FitResult& fit, double p_t0, std::optional<double> p_th = std::nullopt);

/// Shortest sample spacing that can resolve a lifetime: 3x the mean spacing.
double detection_floor(const DecayTrace& trace);

enum class Provenance { simulated, ingested };
std::string to_string(Provenance provenance);

struct TraceBundle {
    std::vector<DecayTrace> traces;
    Provenance provenance = Provenance::simulated;
};

struct LifetimeRow {
    std::optional<double> omega;
    double inv_gamma_1 = 0.0;
    double inv_gamma_1_error = 0.0;
    double inv_gamma_t = 0.0;
    double inv_gamma_t_error = 0.0;
    double b = 0.0;
    double b_error = 0.0;
    double b_gamma_1 = 0.0;                 // proportional to the TLS-induced decay
    std::optional<double> gamma_q_tls;      // when p_t0 is supplied
    bool converged = false;
    bool below_detection = false;  // slow lifetime unresolved by the sampling
    std::string error;             // set when the fit threw
};

/// One biexponential fit per trace.
std::vector<LifetimeRow> lifetime_vs_frequency(const TraceBundle& bundle, const FitOptions& options = {},
                                               std::optional<double> p_t0 = std::nullopt);

/// Adds N(0, sigma^2) to every population and records sigma as the
/// per-sample uncertainty.
DecayTrace add_gaussian_noise(const DecayTrace& trace, double sigma, std::mt19937_64& rng);

/// Model evaluated on a time grid, as a trace.
DecayTrace model_trace(const TriexpModel& model, std::span<const double> times);
DecayTrace model_trace(const BiexpModel& model, std::span<const double> times);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);
/// n linearly spaced points from lo to hi inclusive.
std::vector<double> linear_spaced(double lo, double hi, std::size_t n);

}  // namespace tlsbath
