#pragma once

// Solomon rate equations for a qubit exchanging population with N TLSs:
//
//   dp_q/dt   = -G_q (p_q - p_th) - sum_k G_qt^k (p_q - p_t^k)
//   dp_t^k/dt = -G_t^k (p_t^k - p_th) - G_qt^k (p_t^k - p_q)
//
// written as dp/dt = A p + r with p = (p_q, p_t^1 .. p_t^N). A is a symmetric
// arrowhead matrix and the all-p_th vector is its unique fixed point, so the
// flow is p(t) = p_th + exp(A t) (p(0) - p_th), evaluated exactly.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tlsbath/model.hpp"

namespace tlsbath {

/// Qubit plus an explicit TLS list with their current populations. Values are
/// immutable once built; evolution returns a new system.
class SolomonSystem {
public:
    SolomonSystem(QubitParams qubit, std::vector<Tls> tls, double p_q);

    const QubitParams& qubit() const { return qubit_; }
    std::span<const Tls> tls() const { return tls_; }
    double p_q() const { return p_q_; }
    std::size_t size() const { return tls_.size(); }

    /// Cached exchange rates G_qt^k for the current detunings.
    std::span<const double> purcell_rates() const { return purcell_; }

    /// Sum of the exchange rates plus G_q.
    double gamma_1() const;

    /// (p_q, p_t^1, ..., p_t^N).
    Eigen::VectorXd state() const;

    /// Same couplings, populations replaced by `state` (size N + 1).
    SolomonSystem with_state(const Eigen::VectorXd& state) const;

    /// Same couplings and TLS populations, qubit population replaced.
    SolomonSystem with_qubit_population(double p_q) const;

private:
    QubitParams qubit_;
    std::vector<Tls> tls_;
    std::vector<double> purcell_;
    double p_q_;
};

struct Generator {
    Eigen::MatrixXd a;
    Eigen::VectorXd r;
};

/// Dense A and r of dp/dt = A p + r.
Generator build_generator(const SolomonSystem& system);

enum class PropagationMethod {
    automatic,  // eigendecomposition, Pade scaling-and-squaring if it is unreliable
    eigen,
    pade,
};

/// Exact flow of one generator. Construction does the O(N^3) work; each
/// propagation afterwards is a matrix-vector (or matrix-matrix) product.
class Propagator {
public:
    explicit Propagator(const SolomonSystem& system,
                        PropagationMethod method = PropagationMethod::automatic);

    /// State after `duration` seconds, unclamped.
    Eigen::VectorXd propagate(const Eigen::VectorXd& initial, double duration) const;

    /// Column j holds the state at times[j].
    Eigen::MatrixXd propagate_many(const Eigen::VectorXd& initial, std::span<const double> times) const;

    PropagationMethod method() const { return method_; }
    std::size_t dimension() const { return static_cast<std::size_t>(a_.rows()); }

    /// Eigenvalues of A (eigen path only; empty for Pade).
    const Eigen::VectorXd& eigenvalues() const { return lambda_; }

private:
    PropagationMethod method_;
    double p_th_;
    Eigen::MatrixXd a_;
    Eigen::VectorXd lambda_;
    Eigen::MatrixXd vectors_;
};

/// Clamps rounding-level excursions ([-1e-9, 0) and (1, 1 + 1e-9]) into
/// [0, 1]; throws NumericError for anything larger or non-finite.
void clamp_populations(Eigen::Ref<Eigen::VectorXd> state);

/// System after `duration` seconds. duration == 0 returns the input.
SolomonSystem evolve(const SolomonSystem& system, double duration);

/// Sampled populations over time.
struct DecayTrace {
    std::vector<double> times;   // seconds, strictly increasing
    std::vector<double> p_q;
    std::vector<double> p_q_std;  // optional per-sample uncertainty
    std::vector<std::vector<double>> p_t;  // optional, p_t[i][k] at times[i]
    std::optional<double> omega;  // qubit frequency during the trace
    std::string probe_state;      // "g", "e" or empty
    std::string sequence_id;

    std::size_t size() const { return times.size(); }
    /// Throws ArgumentError if sizes disagree, times are not strictly
    /// increasing, or populations are non-finite.
    void validate() const;
};

/// Populations at each of `times` (seconds, strictly increasing, >= 0),
/// measured from the system's current state.
DecayTrace sample_trace(const SolomonSystem& system, std::span<const double> times,
                        bool record_tls = false);

struct TransitionRates {
    double gamma_up = 0.0;
    double gamma_down = 0.0;
};

/// Upward rate dp_q/dt at p_q = 0 and downward rate -dp_q/dt at p_q = 1 with
/// the TLS populations held fixed. Their sum is the total decay rate.
TransitionRates transition_rates(const SolomonSystem& system);

/// gamma_up / (gamma_up + gamma_down).
double equilibrium_population(const SolomonSystem& system);

/// Adiabatic biexponential for a dense uniform bath:
///   p_q(t) = q0 e^{-G1 t} + (G_tls/G1) s0 e^{-G_t t} + p_th
/// with s0 = p_t0 - p_th and q0 chosen so that p_q(0) = p_q0.
double biexp_solution(double gamma_1, double gamma_q_tls, double gamma_t, double p_q0,
                      double p_t0, double p_th, double t);

struct BiexpModel {
    double a = 0.0;
    double gamma_1 = 0.0;  // fast
    double b = 0.0;
    double gamma_t = 0.0;  // slow
    double c = 0.0;

    double operator()(double t) const;
};

struct TriexpModel {
    double a = 0.0;
    double gamma_1 = 0.0;
    double b = 0.0;
    double gamma_t = 0.0;
    double b_l = 0.0;
    double gamma_t_l = 0.0;
    double c = 0.0;

    double operator()(double t) const;
    BiexpModel biexp() const { return {a, gamma_1, b, gamma_t, c}; }
};

double triexp_solution(const TriexpModel& model, double t);

/// Hole-burning rate balance: excitation (1 - p) / tau_r against decay of
/// n_tls resonant TLSs, p = G_r / (N G_t + G_r) with G_r = 1 / tau_r.
double steady_state_holeburn(double n_tls, double gamma_t, double tau_r);

}  // namespace tlsbath
