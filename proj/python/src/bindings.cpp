#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tlsbath/cli.hpp"
#include "tlsbath/config.hpp"
#include "tlsbath/errors.hpp"
#include "tlsbath/fitting.hpp"
#include "tlsbath/regimes.hpp"
#include "tlsbath/sequence.hpp"

#include <sstream>

namespace py = pybind11;
using namespace tlsbath;

namespace {

py::dict trace_dict(const DecayTrace& t) {
    py::dict d;
    d["times"] = t.times;
    d["population"] = t.p_q;
    d["population_std"] = t.p_q_std;
    d["frequency_hz"] = t.omega ? py::object(py::float_(units::to_hz(*t.omega))) : py::none();
    d["probe_state"] = t.probe_state;
    d["sequence_id"] = t.sequence_id;
    return d;
}

py::dict fit_dict(const FitResult& r) {
    const auto names = parameter_names(r.model);
    const TriexpModel& p = r.params;
    const std::vector<double> all{p.a, p.gamma_1, p.b, p.gamma_t, p.b_l, p.gamma_t_l, p.c};
    py::dict params;
    py::dict errors;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string& n = names[i];
        double v = p.c;
        if (n == "a") v = all[0];
        if (n == "gamma_1") v = all[1];
        if (n == "b") v = all[2];
        if (n == "gamma_t") v = all[3];
        if (n == "b_l") v = all[4];
        if (n == "gamma_t_l") v = all[5];
        params[n.c_str()] = v;
        errors[n.c_str()] = i < r.std_errors.size() ? r.std_errors[i] : 0.0;
    }
    py::dict d;
    d["model"] = to_string(r.model);
    d["params"] = params;
    d["std_errors"] = errors;
    d["residual_rms"] = r.residual_rms;
    d["converged"] = r.converged;
    d["n_iterations"] = r.n_iterations;
    d["degenerate"] = r.degenerate;
    d["high_residual"] = r.high_residual;
    return d;
}

DecayTrace make_trace(std::vector<double> times, std::vector<double> population, std::vector<double> std) {
    DecayTrace t;
    t.times = std::move(times);
    t.p_q = std::move(population);
    t.p_q_std = std::move(std);
    return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of tlsbath";
    m.attr("__version__") = TLSBATH_PY_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("purcell_rate", &purcell_rate, py::arg("g"), py::arg("gamma_m"), py::arg("delta"));
    m.def("fermi_rate", &fermi_rate, py::arg("g"), py::arg("rho"));
    m.def("comb_sum_closed_form", &comb_sum_closed_form, py::arg("a"), py::arg("b"), py::arg("c"));

    m.def(
        "comb_lifetime",
        [](double g, double gamma_t, double rho, double gamma_q, const std::string& offset, double fraction) {
            return comb_lifetime(g, gamma_t, rho, gamma_q, {parse_offset_policy(offset), fraction});
        },
        py::arg("g"), py::arg("gamma_t"), py::arg("rho"), py::arg("gamma_q") = 0.0, py::arg("offset") = "fixed",
        py::arg("offset_fraction") = 0.5);

    m.def(
        "regime_classify",
        [](double g, double gamma_t, double rho, double gamma_q) {
            return to_string(regime_classify(g, gamma_t, rho, gamma_q));
        },
        py::arg("g"), py::arg("gamma_t"), py::arg("rho"), py::arg("gamma_q") = 0.0);

    m.def(
        "simulate_decay",
        [](const std::vector<std::tuple<double, double, double, double>>& tls, std::vector<double> times,
           double gamma_q, double p_th, double p_q0, double omega_q) {
            QubitParams q;
            q.omega_q = omega_q;
            q.gamma_q = gamma_q;
            q.p_th = p_th;
            std::vector<Tls> list;
            for (const auto& [delta, g, gamma_t, p] : tls) list.push_back({delta, g, gamma_t, p});
            return trace_dict(sample_trace(SolomonSystem(q, list, p_q0), times));
        },
        py::arg("tls"), py::arg("times"), py::arg("gamma_q") = 0.0, py::arg("p_th") = 0.028, py::arg("p_q0") = 1.0,
        py::arg("omega_q") = 2.0 * units::pi * 6e9,
        "Exact Solomon relaxation. `tls` holds (detuning, g, gamma_t, population) tuples in rad/s and 1/s.");

    m.def(
        "fit",
        [](std::vector<double> times, std::vector<double> population, const std::string& model,
           std::vector<double> population_std, const std::string& weighting) {
            FitOptions o;
            o.weighting = parse_weighting(weighting);
            return fit_dict(fit_model(parse_model_kind(model),
                                      make_trace(std::move(times), std::move(population), std::move(population_std)), o));
        },
        py::arg("times"), py::arg("population"), py::arg("model") = "bi",
        py::arg("population_std") = std::vector<double>{}, py::arg("weighting") = "uniform");

    m.def(
        "validate_config",
        [](const std::string& text) {
            const RunConfig c = parse_config(text);
            validate_config(c);
            return config_hash(c);
        },
        py::arg("text"), "Validates a configuration document and returns its hash.");

    m.def(
        "serialize_config",
        [](const std::string& text, const std::string& format) {
            return serialize_config(parse_config(text), format == "json" ? ConfigFormat::json : ConfigFormat::yaml);
        },
        py::arg("text"), py::arg("format") = "yaml");

    m.def(
        "holeburn",
        [](const std::string& text) {
            const RunConfig c = parse_config(text);
            validate_config(c);
            const QubitParams q = make_qubit(c);
            const BathSpec bath = make_bath(c);
            const HoleburnSpec spec = make_holeburn(c);
            py::dict d;
            d["trace"] = spec.tau_d_grid.empty() ? py::object(py::none())
                                                 : py::object(trace_dict(holeburn_trace(spec, bath, q)));
            if (c.sequence && !c.sequence->saturation.empty()) {
                const Series s = holeburn_saturation_curve(spec, bath, q, c.sequence->saturation);
                d["saturation"] = py::make_tuple(s.x, s.y);
            } else {
                d["saturation"] = py::none();
            }
            return d;
        },
        py::arg("config"), "Hole-burning trace and saturation curve from a configuration document.");

    m.def(
        "lifetime_map",
        [](std::vector<double> g_grid, std::vector<double> gamma_t_grid, double rho, double gamma_q,
           const std::string& offset, unsigned threads) {
            MapSpec spec = MapSpec::defaults();
            spec.g_grid = std::move(g_grid);
            spec.gamma_t_grid = std::move(gamma_t_grid);
            spec.rho = rho;
            spec.gamma_q = gamma_q;
            spec.offset.policy = parse_offset_policy(offset);
            const LifetimeMap map = lifetime_map(spec, threads);
            std::vector<std::vector<double>> lifetimes(map.n_g, std::vector<double>(map.n_gamma_t));
            std::vector<std::vector<std::string>> regimes(map.n_g, std::vector<std::string>(map.n_gamma_t));
            for (std::size_t i = 0; i < map.n_g; ++i) {
                for (std::size_t j = 0; j < map.n_gamma_t; ++j) {
                    lifetimes[i][j] = map.at(i, j).inv_gamma_1;
                    regimes[i][j] = to_string(map.at(i, j).regime);
                }
            }
            return py::make_tuple(lifetimes, regimes);
        },
        py::arg("g_grid"), py::arg("gamma_t_grid"), py::arg("rho"), py::arg("gamma_q") = 0.0,
        py::arg("offset") = "fixed", py::arg("threads") = 1);

    m.def(
        "frequency_model",
        [](const std::string& config) {
            const FreqModelSpec spec = make_freq_model_spec(config.empty() ? RunConfig{} : parse_config(config));
            std::vector<double> f;
            std::vector<double> life;
            for (const auto& r : frequency_model(spec)) {
                f.push_back(units::to_hz(r.omega));
                life.push_back(r.inv_gamma_1);
            }
            return py::make_tuple(f, life);
        },
        py::arg("config") = "", "(frequencies in Hz, 1/Gamma_1 in s) across the band edge.");

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "tlsbath");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool in-process; returns (exit code, stdout, stderr).");
}
