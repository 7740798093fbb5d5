#include "tlsbath/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tlsbath/config.hpp"
#include "tlsbath/errors.hpp"
#include "tlsbath/trace_io.hpp"

#ifndef TLSBATH_VERSION
#define TLSBATH_VERSION "0.0.0"
#endif

namespace tlsbath {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    unsigned threads = 1;
    std::string format = "csv";
    std::string model;
    std::string weighting;
    std::string init;
    std::vector<std::string> files;
};

struct Context {
    std::string command;
    RunConfig config;
    bool has_config = false;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool json_format = false;
};

// Collects file contents and writes them, then the manifest, in a fixed order.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

    void commit(const Context& ctx) const {
        fs::create_directories(dir_);
        json outputs = json::array();
        for (const auto& [name, content] : files_) {
            write(name, content);
            outputs.push_back({{"file", name}, {"fnv1a", fnv1a_hex(content)}});
        }
        json manifest;
        manifest["tool"] = "tlsbath";
        manifest["version"] = TLSBATH_VERSION;
        manifest["command"] = ctx.command;
        manifest["config_hash"] = ctx.has_config ? json(config_hash(ctx.config)) : json(nullptr);
        manifest["seed"] = ctx.seed;
        manifest["format"] = ctx.json_format ? "json" : "csv";
        manifest["outputs"] = outputs;
        write("manifest.json", manifest.dump(2) + "\n");
    }

    const fs::path& dir() const { return dir_; }

private:
    void write(const std::string& name, const std::string& content) const {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << content;
    }

    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string traces_text(const std::vector<DecayTrace>& traces, bool as_json) {
    std::ostringstream s;
    if (as_json) {
        write_traces_json(s, traces);
    } else {
        write_traces_csv(s, traces);
    }
    return s.str();
}

// A plain table, written as CSV or as a JSON array of row objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    std::string render(bool as_json) const {
        if (as_json) {
            json arr = json::array();
            for (const auto& row : rows) {
                json o;
                for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = row[i];
                arr.push_back(o);
            }
            return arr.dump(2) + "\n";
        }
        std::string s;
        for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
        s += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) s += ",";
                const json& v = row[i];
                if (v.is_number_float()) {
                    s += format_double(v.get<double>());
                } else if (v.is_string()) {
                    s += v.get<std::string>();
                } else {
                    s += v.dump();
                }
            }
            s += "\n";
        }
        return s;
    }
};

std::string ext(const Context& ctx) { return ctx.json_format ? ".json" : ".csv"; }

Table series_table(const Series& series, const std::string& x_name, const std::string& y_name, double x_scale) {
    Table t{{x_name, y_name}, {}};
    for (std::size_t i = 0; i < series.x.size(); ++i) t.rows.push_back({series.x[i] * x_scale, series.y[i]});
    return t;
}

Table saturation_table(const Series& series) {
    Table t{{"pulses", "p_eq"}, {}};
    for (std::size_t i = 0; i < series.x.size(); ++i) {
        t.rows.push_back({static_cast<long long>(series.x[i]), series.y[i]});
    }
    return t;
}

void add_noise(std::vector<DecayTrace>& traces, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) return;
    std::mt19937_64 rng(seed);
    for (auto& t : traces) t = add_gaussian_noise(t, sigma, rng);
}

DecayTrace free_decay(const RunConfig& cfg, const QubitParams& qubit, const BathSpec& bath) {
    if (!bath.covers(qubit.omega_q)) throw ConfigError("qubit.frequency", "outside the bath frequency range");
    const std::string initial = cfg.simulate ? cfg.simulate->initial_state : "e";
    SequenceEngine engine(bath, qubit);
    Eigen::VectorXd state = engine.thermal_state();
    state[0] = initial == "e" ? 1.0 : 0.0;
    const SolomonSystem system = engine.system_at(qubit.omega_q, state);

    std::vector<double> times;
    if (cfg.simulate && cfg.simulate->delays) {
        times = cfg.simulate->delays->resolve(units::Kind::duration);
    } else {
        const double gamma_1 = system.gamma_1();
        times = linear_spaced(0.0, gamma_1 > 0.0 ? 5.0 / gamma_1 : 100e-6, 200);
    }
    DecayTrace trace = sample_trace(system, times);
    trace.omega = qubit.omega_q;
    trace.probe_state = initial;
    trace.sequence_id = "free-decay";
    return trace;
}

int cmd_validate(const Context& ctx, std::ostream& out) {
    validate_config(ctx.config);
    out << "ok " << config_hash(ctx.config) << "\n";
    return exit_ok;
}

int cmd_simulate(const Context& ctx, const Options& opt, std::ostream& out) {
    const RunConfig& cfg = ctx.config;
    validate_config(cfg);
    const QubitParams qubit = make_qubit(cfg);
    const BathSpec bath = make_bath(cfg);
    OutputSet outputs(opt.out);

    std::vector<DecayTrace> traces;
    std::optional<Series> saturation;
    if (cfg.sequence) {
        const HoleburnSpec spec = make_holeburn(cfg);
        if (cfg.sequence->scan) {
            const auto freqs = cfg.sequence->scan->resolve(units::Kind::frequency);
            traces = relaxation_scan(spec, freqs, bath, qubit, ctx.threads);
        } else if (!spec.tau_d_grid.empty()) {
            traces.push_back(holeburn_trace(spec, bath, qubit));
        }
        if (!cfg.sequence->saturation.empty()) {
            saturation = holeburn_saturation_curve(spec, bath, qubit, cfg.sequence->saturation);
        }
    } else {
        traces.push_back(free_decay(cfg, qubit, bath));
    }
    add_noise(traces, cfg.simulate ? cfg.simulate->noise : 0.0, ctx.seed);

    if (!traces.empty()) outputs.add("traces" + ext(ctx), traces_text(traces, ctx.json_format));
    if (saturation) outputs.add("saturation" + ext(ctx), saturation_table(*saturation).render(ctx.json_format));
    outputs.commit(ctx);
    out << "simulate: " << traces.size() << " trace(s)";
    if (saturation && !saturation->y.empty()) out << ", final p_eq " << format_double(saturation->y.back());
    out << " -> " << outputs.dir().string() << "\n";
    return exit_ok;
}

int cmd_holeburn(const Context& ctx, const Options& opt, std::ostream& out) {
    const RunConfig& cfg = ctx.config;
    validate_config(cfg);
    if (!cfg.sequence) throw ConfigError("sequence", "section is required");
    const QubitParams qubit = make_qubit(cfg);
    const BathSpec bath = make_bath(cfg);
    const HoleburnSpec spec = make_holeburn(cfg);
    OutputSet outputs(opt.out);

    out << "holeburn:";
    if (!spec.tau_d_grid.empty()) {
        std::vector<DecayTrace> traces{holeburn_trace(spec, bath, qubit)};
        add_noise(traces, cfg.simulate ? cfg.simulate->noise : 0.0, ctx.seed);
        outputs.add("holeburn" + ext(ctx), traces_text(traces, ctx.json_format));
        out << " " << traces.front().size() << " delays";
    }
    if (!cfg.sequence->saturation.empty()) {
        const Series s = holeburn_saturation_curve(spec, bath, qubit, cfg.sequence->saturation);
        outputs.add("saturation" + ext(ctx), saturation_table(s).render(ctx.json_format));
        out << ", p_eq " << format_double(s.y.back()) << " after " << cfg.sequence->saturation.back() << " pulses";
    }
    if (cfg.sequence->spectrum) {
        const auto probes = cfg.sequence->spectrum->resolve(units::Kind::frequency);
        const SpectrumResult r = holeburn_spectrum(spec, probes, bath, qubit);
        outputs.add("spectrum" + ext(ctx),
                    series_table(r.series, "frequency_hz", "p_eq", 1.0 / units::two_pi).render(ctx.json_format));
        out << ", peak " << format_double(units::to_hz(r.peak_omega)) << " Hz, fwhm "
            << format_double(units::to_hz(r.fwhm)) << " Hz";
    }
    outputs.commit(ctx);
    out << " -> " << outputs.dir().string() << "\n";
    return exit_ok;
}

json lifetime_entry(double rate, double rate_error) {
    const double tau = 1.0 / rate;
    const double tau_error = rate_error / (rate * rate);
    const bool ms = tau >= 1e-3;
    const double scale = ms ? 1e3 : 1e6;
    return {{"value", tau * scale}, {"std_error", tau_error * scale}, {"unit", ms ? "ms" : "us"}};
}

json fit_entry(const FitResult& fit, const DecayTrace& trace, const Context& ctx) {
    const auto names = parameter_names(fit.model);
    const TriexpModel& p = fit.params;
    const auto value_of = [&](const std::string& n) {
        if (n == "a") return p.a;
        if (n == "gamma_1") return p.gamma_1;
        if (n == "b") return p.b;
        if (n == "gamma_t") return p.gamma_t;
        if (n == "b_l") return p.b_l;
        if (n == "gamma_t_l") return p.gamma_t_l;
        return p.c;
    };
    json params;
    json lifetimes;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const bool rate = names[i].rfind("gamma", 0) == 0;
        const double v = value_of(names[i]);
        const double e = i < fit.std_errors.size() ? fit.std_errors[i] : 0.0;
        params[names[i]] = {{"value", v}, {"std_error", e}, {"unit", rate ? "1/s" : "1"}};
        if (rate && v > 0.0) lifetimes["1/" + names[i]] = lifetime_entry(v, e);
    }
    json e;
    e["model"] = to_string(fit.model);
    e["params"] = params;
    e["lifetimes"] = lifetimes;
    e["residual_rms"] = fit.residual_rms;
    e["converged"] = fit.converged;
    e["n_iterations"] = fit.n_iterations;
    e["high_residual"] = fit.high_residual;
    e["degenerate"] = fit.degenerate;
    e["frequency_hz"] = trace.omega ? json(units::to_hz(*trace.omega)) : json(nullptr);
    e["probe_state"] = trace.probe_state;
    e["sequence_id"] = trace.sequence_id;
    e["provenance"] = {{"config_hash", ctx.has_config ? json(config_hash(ctx.config)) : json(nullptr)},
                       {"seed", ctx.seed}};
    return e;
}

ModelKind guard_model(const std::string& text) {
    try {
        return parse_model_kind(text);
    } catch (const std::exception& e) {
        throw ConfigError("--model", e.what());
    }
}

int cmd_fit(const Context& ctx, const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.files.empty()) throw ConfigError("", "fit needs at least one trace file");
    FitOptions options = ctx.has_config ? make_fit_options(ctx.config) : FitOptions{};
    std::string model_text = ctx.has_config && ctx.config.fit ? ctx.config.fit->model : "bi";
    if (!opt.model.empty()) model_text = opt.model;
    const ModelKind model = guard_model(model_text);
    if (!opt.weighting.empty()) options.weighting = parse_weighting(opt.weighting);
    if (!opt.init.empty()) options.initialization = parse_initialization(opt.init);

    json results = json::array();
    int code = exit_ok;
    std::size_t n_fits = 0;
    std::size_t n_failed = 0;
    for (const auto& file : opt.files) {
        TraceBundle bundle;
        try {
            bundle = ingest_traces(file);
        } catch (const std::exception& e) {
            results.push_back({{"source", file}, {"error", e.what()}});
            err << "error: " << file << ": " << e.what() << "\n";
            code = exit_config;
            continue;
        }
        for (std::size_t i = 0; i < bundle.traces.size(); ++i) {
            const DecayTrace& trace = bundle.traces[i];
            json entry;
            try {
                const FitResult fit = fit_model(model, trace, options);
                entry = fit_entry(fit, trace, ctx);
                ++n_fits;
                if (!fit.converged) {
                    ++n_failed;
                    if (code == exit_ok) code = exit_fit;
                }
            } catch (const FitError& e) {
                entry = {{"model", to_string(model)}, {"converged", false}, {"error", e.what()}};
                ++n_failed;
                if (code == exit_ok) code = exit_fit;
            } catch (const ArgumentError& e) {
                entry = {{"model", to_string(model)}, {"converged", false}, {"error", e.what()}};
                ++n_failed;
                code = exit_config;
            }
            json tagged = {{"source", file}, {"index", i}};
            tagged.update(entry);
            results.push_back(tagged);
        }
    }

    OutputSet outputs(opt.out);
    outputs.add("results.json", results.dump(2) + "\n");
    outputs.commit(ctx);
    out << "fit: " << n_fits << " fit(s), " << n_failed << " failed -> " << outputs.dir().string() << "\n";
    return code;
}

int cmd_map(const Context& ctx, const Options& opt, std::ostream& out) {
    if (ctx.has_config) validate_config(ctx.config);
    const MapSpec spec = make_map_spec(ctx.config);
    const LifetimeMap map = lifetime_map(spec, ctx.threads);
    Table t{{"g_over_2pi_hz", "tls_lifetime_s", "b", "inv_gamma_1_s", "regime"}, {}};
    for (const auto& c : map.cells) {
        t.rows.push_back({units::to_hz(c.g), 1.0 / c.gamma_t, c.b, c.inv_gamma_1, to_string(c.regime)});
    }
    OutputSet outputs(opt.out);
    outputs.add("map" + ext(ctx), t.render(ctx.json_format));
    outputs.commit(ctx);
    out << "map: " << map.n_g << " x " << map.n_gamma_t << " cells -> " << outputs.dir().string() << "\n";
    return exit_ok;
}

int cmd_freq_model(const Context& ctx, const Options& opt, std::ostream& out) {
    if (ctx.has_config) validate_config(ctx.config);
    const FreqModelSpec spec = make_freq_model_spec(ctx.config);
    const auto rows = frequency_model(spec);
    Table t{{"frequency_hz", "g_over_2pi_hz", "tls_lifetime_s", "inv_gamma_1_s"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({units::to_hz(r.omega), units::to_hz(r.g), 1.0 / r.gamma_t, r.inv_gamma_1});
    }
    OutputSet outputs(opt.out);
    outputs.add("freq_model" + ext(ctx), t.render(ctx.json_format));
    outputs.commit(ctx);
    out << "freq-model: " << rows.size() << " frequencies -> " << outputs.dir().string() << "\n";
    return exit_ok;
}

void add_common(CLI::App* cmd, Options& opt, bool config_required) {
    auto* c = cmd->add_option("--config", opt.config, "Run configuration (YAML or JSON)");
    if (config_required) c->required();
    cmd->add_option("--seed", opt.seed, "RNG seed; overrides the config");
    cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
    cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Qubit relaxation in a two-level-system bath", "tlsbath"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(TLSBATH_VERSION));
    Options opt;

    auto* validate = app.add_subcommand("validate-config", "Check a configuration and print its hash");
    add_common(validate, opt, true);
    auto* simulate = app.add_subcommand("simulate", "Simulate relaxation traces");
    add_common(simulate, opt, true);
    auto* holeburn = app.add_subcommand("holeburn", "Hole-burning trace, saturation curve and spectrum");
    add_common(holeburn, opt, true);
    auto* fit = app.add_subcommand("fit", "Fit multi-exponential models to trace files");
    add_common(fit, opt, false);
    fit->add_option("--model", opt.model, "bi or tri")->check(CLI::IsMember({"bi", "tri", "biexp", "triexp"}));
    fit->add_option("--weighting", opt.weighting, "uniform or variance")
        ->check(CLI::IsMember({"uniform", "variance"}));
    fit->add_option("--init", opt.init, "peel-off or rate-grid")->check(CLI::IsMember({"peel-off", "rate-grid"}));
    fit->add_option("files", opt.files, "Trace CSV files");
    auto* map = app.add_subcommand("map", "Lifetime map over coupling and TLS lifetime");
    add_common(map, opt, false);
    auto* freq = app.add_subcommand("freq-model", "Lifetime versus qubit frequency across a band edge");
    add_common(freq, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    try {
        if (!opt.config.empty()) {
            ctx.config = load_config(opt.config);
            ctx.has_config = true;
        }
        if (opt.seed) ctx.config.seed = *opt.seed;
        ctx.seed = ctx.config.seed;
        ctx.threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
        ctx.json_format = opt.format == "json";

        if (ctx.command == "validate-config") return cmd_validate(ctx, out);
        if (ctx.command == "simulate") return cmd_simulate(ctx, opt, out);
        if (ctx.command == "holeburn") return cmd_holeburn(ctx, opt, out);
        if (ctx.command == "fit") return cmd_fit(ctx, opt, out, err);
        if (ctx.command == "map") return cmd_map(ctx, opt, out);
        if (ctx.command == "freq-model") return cmd_freq_model(ctx, opt, out);
        return exit_failure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_config;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const FitError& e) {
        err << "fit error: " << e.what() << "\n";
        return exit_fit;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace tlsbath
