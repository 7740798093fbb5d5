#include "tlsbath/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "tlsbath/errors.hpp"

namespace tlsbath {

namespace {

constexpr double kClampTolerance = 1e-9;
// Eigenvectors whose Gram matrix deviates from identity by more than this are
// treated as ill-conditioned (condition number beyond ~1e8).
constexpr double kOrthogonalityTolerance = 1e-8;

}  // namespace

SolomonSystem::SolomonSystem(QubitParams qubit, std::vector<Tls> tls, double p_q)
    : qubit_(qubit), tls_(std::move(tls)), p_q_(p_q) {
    qubit_.validate();
    if (!(p_q_ >= 0.0 && p_q_ <= 1.0)) throw DomainError("qubit population must lie in [0, 1]");
    purcell_.reserve(tls_.size());
    for (const Tls& t : tls_) {
        t.validate();
        purcell_.push_back(t.g == 0.0 ? 0.0
                                      : purcell_rate(t.g, mutual_decoherence(qubit_.gamma_q, t.gamma_t),
                                                     t.delta));
    }
}

double SolomonSystem::gamma_1() const {
    double sum = qubit_.gamma_q;
    for (double r : purcell_) sum += r;
    return sum;
}

Eigen::VectorXd SolomonSystem::state() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(tls_.size() + 1));
    p(0) = p_q_;
    for (std::size_t k = 0; k < tls_.size(); ++k) p(static_cast<Eigen::Index>(k + 1)) = tls_[k].p;
    return p;
}

SolomonSystem SolomonSystem::with_state(const Eigen::VectorXd& state) const {
    if (static_cast<std::size_t>(state.size()) != tls_.size() + 1) {
        throw ArgumentError("state vector size does not match system");
    }
    SolomonSystem out = *this;
    out.p_q_ = state(0);
    for (std::size_t k = 0; k < tls_.size(); ++k) {
        out.tls_[k].p = state(static_cast<Eigen::Index>(k + 1));
    }
    return out;
}

SolomonSystem SolomonSystem::with_qubit_population(double p_q) const {
    if (!(p_q >= 0.0 && p_q <= 1.0)) throw DomainError("qubit population must lie in [0, 1]");
    SolomonSystem out = *this;
    out.p_q_ = p_q;
    return out;
}

Generator build_generator(const SolomonSystem& system) {
    const auto n = static_cast<Eigen::Index>(system.size());
    const auto& qubit = system.qubit();
    const auto rates = system.purcell_rates();
    const auto tls = system.tls();

    Generator gen;
    gen.a = Eigen::MatrixXd::Zero(n + 1, n + 1);
    gen.r = Eigen::VectorXd::Zero(n + 1);

    double qubit_out = qubit.gamma_q;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double rate = rates[static_cast<std::size_t>(k)];
        const double gamma_t = tls[static_cast<std::size_t>(k)].gamma_t;
        qubit_out += rate;
        gen.a(0, k + 1) = rate;
        gen.a(k + 1, 0) = rate;
        gen.a(k + 1, k + 1) = -(gamma_t + rate);
        gen.r(k + 1) = gamma_t * qubit.p_th;
    }
    gen.a(0, 0) = -qubit_out;
    gen.r(0) = qubit.gamma_q * qubit.p_th;
    return gen;
}

Propagator::Propagator(const SolomonSystem& system, PropagationMethod method)
    : method_(method), p_th_(system.qubit().p_th), a_(build_generator(system).a) {
    if (method_ == PropagationMethod::pade) return;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a_);
    bool usable = solver.info() == Eigen::Success;
    if (usable) {
        const Eigen::MatrixXd& v = solver.eigenvectors();
        const auto dim = v.cols();
        const Eigen::MatrixXd gram = v.transpose() * v;
        const double deviation = (gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
        usable = std::isfinite(deviation) && deviation < kOrthogonalityTolerance;
    }
    if (!usable) {
        if (method_ == PropagationMethod::eigen) {
            throw NumericError("eigendecomposition of the rate generator is unreliable");
        }
        method_ = PropagationMethod::pade;
        return;
    }
    lambda_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
    method_ = PropagationMethod::eigen;
}

Eigen::VectorXd Propagator::propagate(const Eigen::VectorXd& initial, double duration) const {
    if (!(duration >= 0.0)) throw ArgumentError("propagation time must be non-negative");
    if (initial.size() != a_.rows()) throw ArgumentError("state vector size does not match generator");
    if (duration == 0.0) return initial;

    const Eigen::VectorXd excess = initial.array() - p_th_;
    Eigen::VectorXd out;
    if (method_ == PropagationMethod::pade) {
        const Eigen::MatrixXd flow = (a_ * duration).exp();
        out = flow * excess;
    } else {
        const Eigen::VectorXd modes = vectors_.transpose() * excess;
        const Eigen::VectorXd decayed = ((lambda_ * duration).array().exp() * modes.array()).matrix();
        out = vectors_ * decayed;
    }
    out.array() += p_th_;
    return out;
}

Eigen::MatrixXd Propagator::propagate_many(const Eigen::VectorXd& initial,
                                           std::span<const double> times) const {
    if (initial.size() != a_.rows()) throw ArgumentError("state vector size does not match generator");
    const auto cols = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd out(a_.rows(), cols);
    const Eigen::VectorXd excess = initial.array() - p_th_;

    if (method_ == PropagationMethod::pade) {
        for (Eigen::Index j = 0; j < cols; ++j) out.col(j) = propagate(initial, times[static_cast<std::size_t>(j)]);
        return out;
    }
    for (double t : times) {
        if (!(t >= 0.0)) throw ArgumentError("propagation time must be non-negative");
    }
    const Eigen::VectorXd modes = vectors_.transpose() * excess;
    Eigen::MatrixXd weights(a_.rows(), cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double t = times[static_cast<std::size_t>(j)];
        weights.col(j) = ((lambda_ * t).array().exp() * modes.array()).matrix();
    }
    out.noalias() = vectors_ * weights;
    out.array() += p_th_;
    // t == 0 columns are returned bit-exact.
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (times[static_cast<std::size_t>(j)] == 0.0) out.col(j) = initial;
    }
    return out;
}

void clamp_populations(Eigen::Ref<Eigen::VectorXd> state) {
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        double& v = state(i);
        if (!std::isfinite(v)) throw NumericError("non-finite population after propagation");
        if (v < 0.0) {
            if (v < -kClampTolerance) {
                throw NumericError("population " + std::to_string(v) + " below 0 beyond rounding");
            }
            v = 0.0;
        } else if (v > 1.0) {
            if (v > 1.0 + kClampTolerance) {
                throw NumericError("population " + std::to_string(v) + " above 1 beyond rounding");
            }
            v = 1.0;
        }
    }
}

SolomonSystem evolve(const SolomonSystem& system, double duration) {
    if (!(duration >= 0.0)) throw ArgumentError("evolve: duration must be non-negative");
    if (duration == 0.0) return system;
    Propagator prop(system);
    Eigen::VectorXd next = prop.propagate(system.state(), duration);
    clamp_populations(next);
    return system.with_state(next);
}

void DecayTrace::validate() const {
    if (p_q.size() != times.size()) throw ArgumentError("trace: times and populations differ in length");
    if (!p_q_std.empty() && p_q_std.size() != times.size()) {
        throw ArgumentError("trace: uncertainty column differs in length");
    }
    if (!p_t.empty() && p_t.size() != times.size()) {
        throw ArgumentError("trace: TLS populations differ in length");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(p_q[i])) {
            throw ArgumentError("trace: non-finite sample at index " + std::to_string(i));
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw ArgumentError("trace: times must be strictly increasing");
        }
    }
}

DecayTrace sample_trace(const SolomonSystem& system, std::span<const double> times, bool record_tls) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw ArgumentError("sample_trace: times must be non-negative");
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw ArgumentError("sample_trace: times must be strictly increasing");
        }
    }
    DecayTrace trace;
    trace.times.assign(times.begin(), times.end());
    trace.omega = system.qubit().omega_q;
    trace.p_q.reserve(times.size());
    if (times.empty()) return trace;

    Propagator prop(system);
    Eigen::MatrixXd states = prop.propagate_many(system.state(), times);
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
        clamp_populations(states.col(j));
        trace.p_q.push_back(states(0, j));
        if (record_tls) {
            std::vector<double> row(system.size());
            for (std::size_t k = 0; k < system.size(); ++k) row[k] = states(static_cast<Eigen::Index>(k + 1), j);
            trace.p_t.push_back(std::move(row));
        }
    }
    return trace;
}

TransitionRates transition_rates(const SolomonSystem& system) {
    const auto& qubit = system.qubit();
    const auto rates = system.purcell_rates();
    const auto tls = system.tls();
    TransitionRates out;
    out.gamma_up = qubit.gamma_q * qubit.p_th;
    out.gamma_down = qubit.gamma_q * (1.0 - qubit.p_th);
    for (std::size_t k = 0; k < tls.size(); ++k) {
        out.gamma_up += rates[k] * tls[k].p;
        out.gamma_down += rates[k] * (1.0 - tls[k].p);
    }
    return out;
}

double equilibrium_population(const SolomonSystem& system) {
    const auto rates = transition_rates(system);
    const double total = rates.gamma_up + rates.gamma_down;
    if (total == 0.0) return system.qubit().p_th;
    return rates.gamma_up / total;
}

double biexp_solution(double gamma_1, double gamma_q_tls, double gamma_t, double p_q0, double p_t0,
                      double p_th, double t) {
    if (!(gamma_1 > 0.0)) throw DomainError("biexp_solution: gamma_1 must be positive");
    const double slow0 = p_t0 - p_th;
    const double slow_amp = gamma_q_tls / gamma_1 * slow0;
    const double fast_amp = p_q0 - p_th - slow_amp;
    return fast_amp * std::exp(-gamma_1 * t) + slow_amp * std::exp(-gamma_t * t) + p_th;
}

double BiexpModel::operator()(double t) const {
    return a * std::exp(-gamma_1 * t) + b * std::exp(-gamma_t * t) + c;
}

double TriexpModel::operator()(double t) const {
    return a * std::exp(-gamma_1 * t) + b * std::exp(-gamma_t * t) + b_l * std::exp(-gamma_t_l * t) + c;
}

double triexp_solution(const TriexpModel& model, double t) { return model(t); }

double steady_state_holeburn(double n_tls, double gamma_t, double tau_r) {
    if (!(n_tls >= 0.0)) throw DomainError("steady_state_holeburn: TLS count must be non-negative");
    if (!(tau_r > 0.0)) throw DomainError("steady_state_holeburn: tau_r must be positive");
    if (std::isinf(gamma_t)) return n_tls > 0.0 ? 0.0 : 1.0;
    const double gamma_r = 1.0 / tau_r;
    return gamma_r / (n_tls * gamma_t + gamma_r);
}

}  // namespace tlsbath
