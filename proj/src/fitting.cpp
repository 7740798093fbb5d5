#include "tlsbath/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "tlsbath/errors.hpp"

namespace tlsbath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Samples sorted by time; `w` holds the square-root weights.
struct Samples {
    Eigen::VectorXd t;
    Eigen::VectorXd y;
    Eigen::VectorXd w;
    Eigen::Index size() const { return t.size(); }
};

Samples prepare(const DecayTrace& trace, std::size_t min_samples, Weighting weighting) {
    if (trace.p_q.size() != trace.times.size()) {
        throw ArgumentError("fit: times and populations differ in length");
    }
    const std::size_t n = trace.times.size();
    if (n < min_samples) {
        throw ArgumentError("fit: need at least " + std::to_string(min_samples) + " samples, got " +
                            std::to_string(n));
    }
    const bool weighted = weighting == Weighting::variance;
    if (weighted && trace.p_q_std.size() != n) {
        throw ArgumentError("fit: variance weighting needs a population_std per sample");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(trace.times[i]) || !std::isfinite(trace.p_q[i])) {
            throw ArgumentError("fit: non-finite sample at index " + std::to_string(i));
        }
        if (weighted && !(trace.p_q_std[i] > 0.0 && std::isfinite(trace.p_q_std[i]))) {
            throw ArgumentError("fit: population_std must be positive at index " + std::to_string(i));
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return trace.times[l] < trace.times[r]; });

    Samples s;
    s.t.resize(static_cast<Eigen::Index>(n));
    s.y.resize(static_cast<Eigen::Index>(n));
    s.w.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        s.t(j) = trace.times[order[i]];
        s.y(j) = trace.p_q[order[i]];
        s.w(j) = weighted ? 1.0 / trace.p_q_std[order[i]] : 1.0;
    }
    const double span = s.y.maxCoeff() - s.y.minCoeff();
    if (!(span > 1e-14 * std::max(1.0, s.y.cwiseAbs().maxCoeff()))) {
        throw FitError("fit: trace is constant, no decay to fit");
    }
    if (!(s.t(s.size() - 1) > s.t(0))) throw FitError("fit: all samples share one time");
    return s;
}

struct RateBounds {
    double lo;
    double hi;
};

RateBounds rate_bounds(const Samples& s) {
    const double span = s.t(s.size() - 1) - s.t(0);
    double dt = kInf;
    for (Eigen::Index i = 1; i < s.size(); ++i) {
        const double d = s.t(i) - s.t(i - 1);
        if (d > 0.0) dt = std::min(dt, d);
    }
    const double lo = 0.1 / span;
    const double hi = std::max(3.0 / dt, 10.0 * lo);
    return {lo, std::min(hi, lo * 1e9)};
}

struct LinearFit {
    Eigen::VectorXd coef;  // amplitudes, then offset if requested
    double sse = kInf;
};

// Linear least squares for fixed rates over samples [begin, end).
LinearFit solve_linear(const Samples& s, const Eigen::VectorXd& target, std::span<const double> rates,
                       bool offset, Eigen::Index begin, Eigen::Index end) {
    const Eigen::Index m = end - begin;
    const auto k = static_cast<Eigen::Index>(rates.size());
    Eigen::MatrixXd basis(m, k + (offset ? 1 : 0));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double t = s.t(begin + i);
        const double w = s.w(begin + i);
        for (Eigen::Index j = 0; j < k; ++j) basis(i, j) = w * std::exp(-rates[static_cast<std::size_t>(j)] * t);
        if (offset) basis(i, k) = w;
    }
    const Eigen::VectorXd rhs = s.w.segment(begin, m).cwiseProduct(target.segment(begin, m));
    LinearFit fit;
    fit.coef = basis.colPivHouseholderQr().solve(rhs);
    if (!fit.coef.allFinite()) return fit;
    fit.sse = (basis * fit.coef - rhs).squaredNorm();
    return fit;
}

struct SingleExp {
    double rate = 0.0;
    LinearFit linear;
};

// Best single exponential (optionally with offset) over [begin, end): grid in
// ln(rate) followed by golden-section refinement.
SingleExp single_exponential(const Samples& s, const Eigen::VectorXd& target, bool offset, Eigen::Index begin,
                             Eigen::Index end, RateBounds bounds) {
    const int n_grid = 64;
    const double l0 = std::log(bounds.lo);
    const double l1 = std::log(bounds.hi);
    const double step = (l1 - l0) / (n_grid - 1);
    auto cost = [&](double log_rate) {
        const double r = std::exp(log_rate);
        return solve_linear(s, target, std::span<const double>(&r, 1), offset, begin, end).sse;
    };
    int best = 0;
    double best_cost = kInf;
    for (int i = 0; i < n_grid; ++i) {
        const double c = cost(l0 + step * i);
        if (c < best_cost) {
            best_cost = c;
            best = i;
        }
    }
    double a = l0 + step * std::max(0, best - 1);
    double b = l0 + step * std::min(n_grid - 1, best + 1);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = cost(x1);
    double f2 = cost(x2);
    for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = cost(x2);
        }
    }
    SingleExp out;
    out.rate = std::exp(0.5 * (a + b));
    out.linear = solve_linear(s, target, std::span<const double>(&out.rate, 1), offset, begin, end);
    return out;
}

// Rates sorted fast to slow and pushed apart so the Jacobian starts well
// conditioned.
std::vector<double> separate(std::vector<double> rates) {
    std::sort(rates.begin(), rates.end(), std::greater<>());
    for (std::size_t i = rates.size() - 1; i > 0; --i) {
        if (rates[i - 1] < 1.5 * rates[i]) rates[i - 1] = 1.5 * rates[i];
    }
    return rates;
}

std::vector<double> peel_off_rates(const Samples& s, int k) {
    const Eigen::Index n = s.size();
    const RateBounds bounds = rate_bounds(s);
    Eigen::VectorXd residual = s.y;
    std::vector<double> rates;

    const Eigen::Index tail_begin = (2 * n) / 3;
    const SingleExp tail = single_exponential(s, residual, true, tail_begin, n, bounds);
    rates.push_back(tail.rate);
    for (Eigen::Index i = 0; i < n; ++i) {
        residual(i) -= tail.linear.coef(0) * std::exp(-tail.rate * s.t(i)) + tail.linear.coef(1);
    }
    if (k == 3) {
        const SingleExp mid = single_exponential(s, residual, false, n / 3, tail_begin, bounds);
        rates.push_back(mid.rate);
        for (Eigen::Index i = 0; i < n; ++i) residual(i) -= mid.linear.coef(0) * std::exp(-mid.rate * s.t(i));
    }
    const SingleExp head = single_exponential(s, residual, false, 0, std::max<Eigen::Index>(n / 3, 3), bounds);
    rates.push_back(head.rate);
    return separate(std::move(rates));
}

// Exhaustive search over rate tuples drawn from a log grid. The weighted
// basis Gram matrix is formed once, so every tuple costs one small solve.
std::vector<double> grid_rates(const Samples& s, int k) {
    const RateBounds bounds = rate_bounds(s);
    const int m = k == 2 ? 48 : 28;
    const std::vector<double> grid = log_spaced(bounds.lo, bounds.hi, static_cast<std::size_t>(m));

    Eigen::MatrixXd basis(s.size(), m + 1);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        for (int j = 0; j < m; ++j) basis(i, j) = s.w(i) * std::exp(-grid[static_cast<std::size_t>(j)] * s.t(i));
        basis(i, m) = s.w(i);
    }
    const Eigen::VectorXd rhs = s.w.cwiseProduct(s.y);
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    const Eigen::VectorXd proj = basis.transpose() * rhs;
    const double total = rhs.squaredNorm();

    std::vector<int> idx(static_cast<std::size_t>(k));
    std::vector<int> best;
    double best_sse = kInf;
    auto consider = [&] {
        const Eigen::Index d = k + 1;
        Eigen::MatrixXd g(d, d);
        Eigen::VectorXd q(d);
        for (Eigen::Index r = 0; r < d; ++r) {
            const int cr = r < k ? idx[static_cast<std::size_t>(r)] : m;
            q(r) = proj(cr);
            for (Eigen::Index c = 0; c < d; ++c) {
                const int cc = c < k ? idx[static_cast<std::size_t>(c)] : m;
                g(r, c) = gram(cr, cc);
            }
        }
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
        if (ldlt.info() != Eigen::Success) return;
        const Eigen::VectorXd coef = ldlt.solve(q);
        const double sse = total - coef.dot(q);
        if (std::isfinite(sse) && sse < best_sse) {
            best_sse = sse;
            best = idx;
        }
    };
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (k == 2) {
                idx = {i, j};
                consider();
                continue;
            }
            for (int l = j + 1; l < m; ++l) {
                idx = {i, j, l};
                consider();
            }
        }
    }
    if (best.empty()) throw FitError("fit: no usable starting point on the rate grid");
    std::vector<double> rates;
    for (int i : best) rates.push_back(grid[static_cast<std::size_t>(i)]);
    return separate(std::move(rates));
}

// x = [amp_0, ln rate_0, ..., amp_{k-1}, ln rate_{k-1}, c]
struct ExpSumFunctor : Eigen::DenseFunctor<double> {
    const Samples* s;
    int k;

    ExpSumFunctor(const Samples& samples, int components)
        : Eigen::DenseFunctor<double>(2 * components + 1, static_cast<int>(samples.size())),
          s(&samples),
          k(components) {}

    int operator()(const InputType& x, ValueType& f) const {
        for (Eigen::Index i = 0; i < s->size(); ++i) {
            double model = x(2 * k);
            for (int j = 0; j < k; ++j) model += x(2 * j) * std::exp(-std::exp(x(2 * j + 1)) * s->t(i));
            f(i) = s->w(i) * (model - s->y(i));
        }
        return 0;
    }

    int df(const InputType& x, JacobianType& jac) const {
        for (Eigen::Index i = 0; i < s->size(); ++i) {
            const double t = s->t(i);
            const double w = s->w(i);
            for (int j = 0; j < k; ++j) {
                const double rate = std::exp(x(2 * j + 1));
                const double e = std::exp(-rate * t);
                jac(i, 2 * j) = w * e;
                jac(i, 2 * j + 1) = -w * x(2 * j) * rate * t * e;
            }
            jac(i, 2 * k) = w;
        }
        return 0;
    }
};

struct Solution {
    Eigen::VectorXd x;
    double weighted_sse = kInf;
    double rms = kInf;
    bool converged = false;
    int iterations = 0;
    std::string status;
};

std::string status_text(Eigen::LevenbergMarquardtSpace::Status status) {
    using namespace Eigen::LevenbergMarquardtSpace;
    switch (status) {
        case ImproperInputParameters: return "improper input parameters";
        case RelativeReductionTooSmall: return "relative reduction below ftol";
        case RelativeErrorTooSmall: return "relative step below xtol";
        case RelativeErrorAndReductionTooSmall: return "relative step and reduction below tolerance";
        case CosinusTooSmall: return "gradient orthogonal to residual";
        case TooManyFunctionEvaluation: return "evaluation budget exhausted";
        case FtolTooSmall: return "no further reduction possible (ftol)";
        case XtolTooSmall: return "no further improvement possible (xtol)";
        case GtolTooSmall: return "gradient orthogonal to residual (gtol)";
        default: return "not run";
    }
}

Solution minimise(const Samples& s, int k, std::span<const double> init_rates, const FitOptions& options) {
    Eigen::VectorXd x(2 * k + 1);
    {
        const LinearFit lin = solve_linear(s, s.y, init_rates, true, 0, s.size());
        for (int j = 0; j < k; ++j) {
            x(2 * j) = std::isfinite(lin.coef(j)) ? lin.coef(j) : 0.0;
            x(2 * j + 1) = std::log(init_rates[static_cast<std::size_t>(j)]);
        }
        x(2 * k) = std::isfinite(lin.coef(k)) ? lin.coef(k) : s.y(s.size() - 1);
    }

    ExpSumFunctor functor(s, k);
    Eigen::LevenbergMarquardt<ExpSumFunctor> lm(functor);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    lm.setGtol(0.0);
    lm.setMaxfev(options.max_evaluations);
    const auto status = lm.minimize(x);

    using namespace Eigen::LevenbergMarquardtSpace;
    Solution out;
    out.x = x;
    out.iterations = static_cast<int>(lm.iterations());
    out.status = status_text(status);
    out.converged = status != ImproperInputParameters && status != TooManyFunctionEvaluation &&
                    status != NotStarted && status != Running && status != UserAsked && x.allFinite();
    for (int j = 0; j < k; ++j) {
        if (!(x(2 * j + 1) < 700.0)) out.converged = false;
    }
    Eigen::VectorXd f(s.size());
    functor(x, f);
    out.weighted_sse = f.squaredNorm();
    const Eigen::VectorXd raw = f.cwiseQuotient(s.w);
    out.rms = std::sqrt(raw.squaredNorm() / static_cast<double>(s.size()));
    if (!std::isfinite(out.weighted_sse)) out.converged = false;
    return out;
}

// Standard errors of x from s^2 (J^T J)^-1. Parameters touching a null
// direction of J^T J get an infinite error.
Eigen::VectorXd parameter_errors(const Samples& s, int k, const Solution& sol) {
    const Eigen::Index p = 2 * k + 1;
    Eigen::VectorXd errors = Eigen::VectorXd::Constant(p, kInf);
    const Eigen::Index dof = s.size() - p;
    if (dof <= 0) return errors;
    ExpSumFunctor functor(s, k);
    Eigen::MatrixXd jac(s.size(), p);
    functor.df(sol.x, jac);

    Eigen::VectorXd scale = jac.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(scale(j) > 0.0)) scale(j) = 1.0;
    }
    const Eigen::MatrixXd js = jac * scale.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd normal = js.transpose() * js;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    if (eig.info() != Eigen::Success) return errors;
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const double cutoff = 1e-13 * lambda.maxCoeff();

    const double s2 = sol.weighted_sse / static_cast<double>(dof);
    for (Eigen::Index i = 0; i < p; ++i) {
        double var = 0.0;
        bool singular = false;
        for (Eigen::Index m = 0; m < p; ++m) {
            if (lambda(m) <= cutoff) {
                if (std::abs(v(i, m)) > 1e-6) singular = true;
                continue;
            }
            var += v(i, m) * v(i, m) / lambda(m);
        }
        if (!singular) errors(i) = std::sqrt(s2 * var) / scale(i);
    }
    return errors;
}

struct Component {
    double amplitude;
    double rate;
    double amplitude_error;
    double rate_error;
};

struct Extracted {
    std::vector<Component> components;  // fast to slow
    double c;
    double c_error;
};

Extracted extract(const Samples& s, int k, const Solution& sol) {
    const Eigen::VectorXd err = parameter_errors(s, k, sol);
    Extracted out;
    for (int j = 0; j < k; ++j) {
        const double rate = std::exp(sol.x(2 * j + 1));
        out.components.push_back({sol.x(2 * j), rate, err(2 * j), rate * err(2 * j + 1)});
    }
    std::stable_sort(out.components.begin(), out.components.end(),
                     [](const Component& l, const Component& r) { return l.rate > r.rate; });
    out.c = sol.x(2 * k);
    out.c_error = err(2 * k);
    return out;
}

// Index of the first adjacent pair whose rates agree within `tolerance`.
std::optional<std::size_t> degenerate_pair(const std::vector<Component>& comps, double tolerance) {
    for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
        if ((comps[i].rate - comps[i + 1].rate) <= tolerance * comps[i].rate) return i;
    }
    return std::nullopt;
}

// A component whose amplitude is indistinguishable from zero carries no rate
// information.
std::optional<std::size_t> empty_component(const std::vector<Component>& comps) {
    double scale = 0.0;
    for (const auto& c : comps) scale = std::max(scale, std::abs(c.amplitude));
    std::optional<std::size_t> weakest;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const double amp = std::abs(comps[i].amplitude);
        const bool empty = amp <= 1e-9 * scale || !(amp > 2.0 * comps[i].amplitude_error);
        if (empty && (!weakest || amp < std::abs(comps[*weakest].amplitude))) weakest = i;
    }
    return weakest;
}

struct Fitted {
    Extracted values;
    Solution solution;
    bool degenerate = false;
};

Fitted fit_components(const Samples& s, int k, std::vector<double> init_rates, const FitOptions& options) {
    Fitted out;
    out.solution = minimise(s, k, init_rates, options);
    out.values = extract(s, k, out.solution);
    while (k > 1) {
        const auto& comps = out.values.components;
        std::vector<double> merged;
        if (const auto pair = degenerate_pair(comps, options.degeneracy_tolerance)) {
            for (std::size_t i = 0; i < comps.size(); ++i) {
                if (i == *pair + 1) continue;
                merged.push_back(i == *pair ? std::sqrt(comps[i].rate * comps[i + 1].rate) : comps[i].rate);
            }
        } else if (const auto drop = empty_component(comps)) {
            for (std::size_t i = 0; i < comps.size(); ++i) {
                if (i != *drop) merged.push_back(comps[i].rate);
            }
        } else {
            break;
        }
        --k;
        const int prior_iterations = out.solution.iterations;
        out.solution = minimise(s, k, separate(merged), options);
        out.solution.iterations += prior_iterations;
        out.values = extract(s, k, out.solution);
        out.degenerate = true;
    }
    return out;
}

FitResult assemble(ModelKind kind, const Fitted& fitted, const FitOptions& options, const DecayTrace& trace,
                   Initialization init) {
    FitResult r;
    r.model = kind;
    r.initialization = init;
    r.converged = fitted.solution.converged;
    r.n_iterations = fitted.solution.iterations;
    r.residual_rms = fitted.solution.rms;
    r.degenerate = fitted.degenerate;
    r.status = fitted.solution.status;

    std::vector<Component> comps = fitted.values.components;
    const std::size_t slots = kind == ModelKind::biexp ? 2 : 3;
    while (comps.size() < slots) comps.push_back({0.0, 0.0, 0.0, 0.0});

    r.params.a = comps[0].amplitude;
    r.params.gamma_1 = comps[0].rate;
    r.params.b = comps[1].amplitude;
    r.params.gamma_t = comps[1].rate;
    if (kind == ModelKind::triexp) {
        r.params.b_l = comps[2].amplitude;
        r.params.gamma_t_l = comps[2].rate;
    }
    r.params.c = fitted.values.c;

    r.std_errors = {comps[0].amplitude_error, comps[0].rate_error, comps[1].amplitude_error,
                    comps[1].rate_error};
    if (kind == ModelKind::triexp) {
        r.std_errors.push_back(comps[2].amplitude_error);
        r.std_errors.push_back(comps[2].rate_error);
    }
    r.std_errors.push_back(fitted.values.c_error);

    double threshold = options.residual_threshold;
    if (!trace.p_q_std.empty()) {
        double mean_sq = 0.0;
        for (double v : trace.p_q_std) mean_sq += v * v;
        threshold = 3.0 * std::sqrt(mean_sq / static_cast<double>(trace.p_q_std.size()));
    }
    r.high_residual = r.residual_rms > threshold;
    return r;
}

FitResult fit_impl(ModelKind kind, const DecayTrace& trace, std::optional<std::vector<double>> init_rates,
                   const FitOptions& options) {
    const int k = kind == ModelKind::biexp ? 2 : 3;
    const Samples s = prepare(trace, kind == ModelKind::biexp ? 6 : 8, options.weighting);

    if (init_rates) {
        for (double r : *init_rates) {
            if (!(r > 0.0 && std::isfinite(r))) throw ArgumentError("fit: initial rates must be positive");
        }
        return assemble(kind, fit_components(s, k, separate(*init_rates), options), options, trace,
                        options.initialization);
    }

    auto run = [&](Initialization init) {
        const auto rates = init == Initialization::peel_off ? peel_off_rates(s, k) : grid_rates(s, k);
        return fit_components(s, k, rates, options);
    };
    Initialization used = options.initialization;
    Fitted best = run(used);
    if (options.multi_start || !best.solution.converged) {
        const Initialization other =
            used == Initialization::peel_off ? Initialization::rate_grid : Initialization::peel_off;
        Fitted alt = run(other);
        const bool better = alt.solution.converged &&
                            (!best.solution.converged ||
                             alt.solution.weighted_sse < best.solution.weighted_sse * (1.0 - 1e-9));
        if (better) {
            best = std::move(alt);
            used = other;
        }
    }
    return assemble(kind, best, options, trace, used);
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::biexp ? "biexp" : "triexp"; }

std::string to_string(Weighting weighting) { return weighting == Weighting::uniform ? "uniform" : "variance"; }

std::string to_string(Initialization init) { return init == Initialization::peel_off ? "peel-off" : "rate-grid"; }

std::string to_string(Provenance provenance) {
    return provenance == Provenance::simulated ? "simulated" : "ingested";
}

ModelKind parse_model_kind(const std::string& text) {
    if (text == "bi" || text == "biexp") return ModelKind::biexp;
    if (text == "tri" || text == "triexp") return ModelKind::triexp;
    throw ArgumentError("model must be 'bi' or 'tri', got '" + text + "'");
}

Weighting parse_weighting(const std::string& text) {
    if (text == "uniform") return Weighting::uniform;
    if (text == "variance") return Weighting::variance;
    throw ArgumentError("weighting must be 'uniform' or 'variance', got '" + text + "'");
}

Initialization parse_initialization(const std::string& text) {
    if (text == "peel-off" || text == "peel_off") return Initialization::peel_off;
    if (text == "rate-grid" || text == "rate_grid") return Initialization::rate_grid;
    throw ArgumentError("initialization must be 'peel-off' or 'rate-grid', got '" + text + "'");
}

std::vector<std::string> parameter_names(ModelKind kind) {
    if (kind == ModelKind::biexp) return {"a", "gamma_1", "b", "gamma_t", "c"};
    return {"a", "gamma_1", "b", "gamma_t", "b_l", "gamma_t_l", "c"};
}

double FitResult::std_error(const std::string& name) const {
    const auto names = parameter_names(model);
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end() || static_cast<std::size_t>(it - names.begin()) >= std_errors.size()) {
        throw ArgumentError("unknown fit parameter '" + name + "'");
    }
    return std_errors[static_cast<std::size_t>(it - names.begin())];
}

FitResult fit_biexp(const DecayTrace& trace, std::optional<BiexpModel> init, const FitOptions& options) {
    std::optional<std::vector<double>> rates;
    if (init) rates = std::vector<double>{init->gamma_1, init->gamma_t};
    return fit_impl(ModelKind::biexp, trace, rates, options);
}

FitResult fit_triexp(const DecayTrace& trace, std::optional<TriexpModel> init, const FitOptions& options) {
    std::optional<std::vector<double>> rates;
    if (init) rates = std::vector<double>{init->gamma_1, init->gamma_t, init->gamma_t_l};
    return fit_impl(ModelKind::triexp, trace, rates, options);
}

FitResult fit_model(ModelKind kind, const DecayTrace& trace, const FitOptions& options) {
    return fit_impl(kind, trace, std::nullopt, options);
}

double gamma_q_tls_estimate(const FitResult& fit, double p_t0, std::optional<double> p_th) {
    const double baseline = p_th.value_or(fit.params.c);
    if (!(p_t0 > baseline)) {
        throw DomainError("gamma_q_tls_estimate: p_t0 must exceed p_th (no hole burned)");
    }
    return fit.params.b * fit.params.gamma_1 / (p_t0 - baseline);
}

double detection_floor(const DecayTrace& trace) {
    if (trace.times.size() < 2) return 0.0;
    const auto [lo, hi] = std::minmax_element(trace.times.begin(), trace.times.end());
    return 3.0 * (*hi - *lo) / static_cast<double>(trace.times.size() - 1);
}

std::vector<LifetimeRow> lifetime_vs_frequency(const TraceBundle& bundle, const FitOptions& options,
                                               std::optional<double> p_t0) {
    std::vector<LifetimeRow> rows;
    rows.reserve(bundle.traces.size());
    for (const DecayTrace& trace : bundle.traces) {
        LifetimeRow row;
        row.omega = trace.omega;
        try {
            const FitResult fit = fit_biexp(trace, std::nullopt, options);
            const auto& m = fit.params;
            row.converged = fit.converged;
            row.inv_gamma_1 = 1.0 / m.gamma_1;
            row.inv_gamma_1_error = fit.std_errors[1] / (m.gamma_1 * m.gamma_1);
            row.b = m.b;
            row.b_error = fit.std_errors[2];
            row.b_gamma_1 = m.b * m.gamma_1;
            if (m.gamma_t > 0.0) {
                row.inv_gamma_t = 1.0 / m.gamma_t;
                row.inv_gamma_t_error = fit.std_errors[3] / (m.gamma_t * m.gamma_t);
            }
            row.below_detection = fit.degenerate || !(m.gamma_t > 0.0) || row.inv_gamma_t < detection_floor(trace);
            if (p_t0) {
                try {
                    row.gamma_q_tls = gamma_q_tls_estimate(fit, *p_t0);
                } catch (const DomainError&) {
                }
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

DecayTrace add_gaussian_noise(const DecayTrace& trace, double sigma, std::mt19937_64& rng) {
    if (!(sigma >= 0.0)) throw ArgumentError("noise sigma must be non-negative");
    DecayTrace out = trace;
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& p : out.p_q) p += noise(rng);
    out.p_q_std.assign(out.p_q.size(), sigma);
    return out;
}

DecayTrace model_trace(const TriexpModel& model, std::span<const double> times) {
    DecayTrace out;
    out.times.assign(times.begin(), times.end());
    out.p_q.reserve(times.size());
    for (double t : times) out.p_q.push_back(model(t));
    return out;
}

DecayTrace model_trace(const BiexpModel& model, std::span<const double> times) {
    return model_trace(TriexpModel{model.a, model.gamma_1, model.b, model.gamma_t, 0.0, 0.0, model.c}, times);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi > 0.0)) throw ArgumentError("log_spaced: bounds must be positive");
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double l0 = std::log(lo);
    const double step = (std::log(hi) - l0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(l0 + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

}  // namespace tlsbath
