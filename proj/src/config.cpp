#include "tlsbath/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "tlsbath/errors.hpp"
#include "tlsbath/trace_io.hpp"

namespace tlsbath {

using json = nlohmann::ordered_json;
using units::Kind;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Schema-checked view of one YAML mapping.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) throw ConfigError(path_, "expected a mapping");
    }

    const std::string& path() const { return path_; }

    bool has(const std::string& key) {
        seen_.insert(key);
        const YAML::Node child = node_[key];
        return child.IsDefined() && !child.IsNull();
    }

    Section map(const std::string& key) {
        require(key);
        return Section(node_[key], join(path_, key));
    }

    std::optional<Section> opt_map(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return map(key);
    }

    Quantity quantity(const std::string& key, Kind kind) {
        require(key);
        return quantity_of(node_[key], join(path_, key), kind);
    }

    std::optional<Quantity> opt_quantity(const std::string& key, Kind kind) {
        if (!has(key)) return std::nullopt;
        return quantity(key, kind);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return number_of(node_[key], join(path_, key));
    }

    std::optional<double> opt_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number_of(node_[key], join(path_, key));
    }

    long long integer(const std::string& key, long long fallback) {
        if (!has(key)) return fallback;
        return integer_of(node_[key], join(path_, key));
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const YAML::Node n = node_[key];
        if (!n.IsScalar()) throw ConfigError(join(path_, key), "expected a string");
        return n.Scalar();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const YAML::Node n = node_[key];
        const std::string s = n.IsScalar() ? n.Scalar() : "";
        if (s == "true") return true;
        if (s == "false") return false;
        throw ConfigError(join(path_, key), "expected true or false");
    }

    std::vector<YAML::Node> list(const std::string& key) {
        if (!has(key)) return {};
        const YAML::Node n = node_[key];
        if (!n.IsSequence()) throw ConfigError(join(path_, key), "expected a list");
        return {n.begin(), n.end()};
    }

    std::string item_path(const std::string& key, std::size_t i) const {
        return join(path_, key) + "[" + std::to_string(i) + "]";
    }

    std::vector<Quantity> quantities(const std::string& key, Kind kind) {
        std::vector<Quantity> out;
        const auto items = list(key);
        for (std::size_t i = 0; i < items.size(); ++i) out.push_back(quantity_of(items[i], item_path(key, i), kind));
        return out;
    }

    std::vector<int> integers(const std::string& key) {
        std::vector<int> out;
        const auto items = list(key);
        for (std::size_t i = 0; i < items.size(); ++i) {
            out.push_back(static_cast<int>(integer_of(items[i], item_path(key, i))));
        }
        return out;
    }

    GridSpec grid(const std::string& key, Kind kind) {
        require(key);
        const YAML::Node n = node_[key];
        const std::string path = join(path_, key);
        GridSpec g;
        if (n.IsSequence()) {
            g.values = quantities(key, kind);
            if (g.values.empty()) throw ConfigError(path, "grid is empty");
            return g;
        }
        Section s(n, path);
        g.start = s.quantity("start", kind);
        g.stop = s.quantity("stop", kind);
        g.count = static_cast<int>(s.integer("count", 0));
        if (g.count < 1) throw ConfigError(join(path, "count"), "must be at least 1");
        g.spacing = s.text("spacing", "linear");
        if (g.spacing != "linear" && g.spacing != "log") {
            throw ConfigError(join(path, "spacing"), "must be 'linear' or 'log'");
        }
        s.finish();
        return g;
    }

    std::optional<GridSpec> opt_grid(const std::string& key, Kind kind) {
        if (!has(key)) return std::nullopt;
        return grid(key, kind);
    }

    void finish() const {
        for (const auto& kv : node_) {
            const std::string key = kv.first.as<std::string>();
            if (!seen_.count(key)) throw ConfigError(join(path_, key), "unknown key");
        }
    }

    static Quantity quantity_of(const YAML::Node& n, const std::string& path, Kind kind) {
        if (!n.IsScalar()) throw ConfigError(path, "expected a quantity with a unit, e.g. '6.3 GHz'");
        try {
            return Quantity::parse(n.Scalar(), kind);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path, e.what());
        }
    }

    static double number_of(const YAML::Node& n, const std::string& path) {
        if (!n.IsScalar()) throw ConfigError(path, "expected a number");
        const std::string s = trim(n.Scalar());
        double v = 0.0;
        const char* begin = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
        const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw ConfigError(path, "'" + s + "' is not a plain number");
        }
        return v;
    }

    static long long integer_of(const YAML::Node& n, const std::string& path) {
        if (!n.IsScalar()) throw ConfigError(path, "expected an integer");
        const std::string s = trim(n.Scalar());
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(path, "'" + s + "' is not an integer");
        return v;
    }

private:
    void require(const std::string& key) {
        if (!has(key)) throw ConfigError(join(path_, key), "required key is missing");
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string choice(Section& s, const std::string& key, const std::string& fallback,
                   std::initializer_list<const char*> allowed) {
    const std::string v = s.text(key, fallback);
    for (const char* a : allowed) {
        if (v == a) return v;
    }
    std::string msg = "must be one of";
    for (const char* a : allowed) msg += std::string(" '") + a + "'";
    throw ConfigError(join(s.path(), key), msg);
}

ReadoutConfig read_readout(Section s) {
    ReadoutConfig r;
    r.frequency = s.quantity("frequency", Kind::frequency);
    r.kappa = s.quantity("kappa", Kind::rate);
    r.coupling = s.quantity("coupling", Kind::frequency);
    s.finish();
    return r;
}

QubitConfig read_qubit(Section s) {
    QubitConfig q;
    q.frequency = s.quantity("frequency", Kind::frequency);
    q.intrinsic_decay = s.opt_quantity("intrinsic_decay", Kind::rate);
    q.p_th = s.number("p_th", q.p_th);
    if (auto r = s.opt_map("readout")) q.readout = read_readout(*r);
    s.finish();
    return q;
}

BandEdgeConfig read_band_edge(Section s) {
    BandEdgeConfig b;
    b.edge = s.quantity("edge", Kind::frequency);
    b.inside = s.quantity("inside", Kind::rate);
    b.outside = s.quantity("outside", Kind::rate);
    s.finish();
    return b;
}

BathConfig read_bath(Section s) {
    BathConfig b;
    const auto tls = s.list("tls");
    for (std::size_t i = 0; i < tls.size(); ++i) {
        Section t(tls[i], s.item_path("tls", i));
        TlsGroupConfig g;
        g.frequency = t.quantity("frequency", Kind::frequency);
        g.coupling = t.quantity("coupling", Kind::frequency);
        g.decay = t.quantity("decay", Kind::rate);
        g.count = static_cast<int>(t.integer("count", 1));
        if (g.count < 0) throw ConfigError(join(t.path(), "count"), "must be non-negative");
        t.finish();
        b.tls.push_back(g);
    }
    const auto combs = s.list("combs");
    for (std::size_t i = 0; i < combs.size(); ++i) {
        Section c(combs[i], s.item_path("combs", i));
        CombConfig cc;
        cc.anchor = c.quantity("anchor", Kind::frequency);
        cc.spacing = c.quantity("spacing", Kind::frequency);
        cc.half_width = static_cast<int>(c.integer("half_width", 0));
        if (cc.half_width < 0) throw ConfigError(join(c.path(), "half_width"), "must be non-negative");
        cc.coupling = c.quantity("coupling", Kind::frequency);
        cc.decay = c.opt_quantity("decay", Kind::rate);
        if (auto e = c.opt_map("band_edge")) cc.band_edge = read_band_edge(*e);
        if (cc.decay.has_value() == cc.band_edge.has_value()) {
            throw ConfigError(c.path(), "give exactly one of 'decay' or 'band_edge'");
        }
        c.finish();
        b.combs.push_back(cc);
    }
    if (auto l = s.opt_map("long_lived")) {
        LongLivedConfig ll;
        ll.fraction = l->number("fraction", 0.0);
        ll.decay = l->quantity("decay", Kind::rate);
        l->finish();
        b.long_lived = ll;
    }
    if (auto r = s.opt_map("range")) {
        b.range_min = r->opt_quantity("min", Kind::frequency);
        b.range_max = r->opt_quantity("max", Kind::frequency);
        r->finish();
    }
    s.finish();
    return b;
}

SequenceConfig read_sequence(Section s) {
    SequenceConfig q;
    q.prepare_frequency = s.quantity("prepare_frequency", Kind::frequency);
    q.interaction_frequency = s.opt_quantity("interaction_frequency", Kind::frequency);
    q.pulses = static_cast<int>(s.integer("pulses", 0));
    if (auto v = s.opt_quantity("relax_wait", Kind::duration)) q.relax_wait = *v;
    q.probe_state = choice(s, "probe_state", "e", {"g", "e"});
    if (s.has("delays")) q.delays = s.grid("delays", Kind::duration);
    q.detuned_delay = s.boolean("detuned_delay", false);
    q.interleave = s.quantities("interleave", Kind::frequency);
    if (auto v = s.opt_quantity("plateau_delay", Kind::duration)) q.plateau_delay = *v;
    q.saturation = s.integers("saturation");
    q.scan = s.opt_grid("scan", Kind::frequency);
    q.spectrum = s.opt_grid("spectrum", Kind::frequency);
    s.finish();
    return q;
}

SimulateConfig read_simulate(Section s) {
    SimulateConfig c;
    c.initial_state = choice(s, "initial_state", "e", {"g", "e"});
    c.delays = s.opt_grid("delays", Kind::duration);
    c.noise = s.number("noise", 0.0);
    if (!(c.noise >= 0.0)) throw ConfigError(join(s.path(), "noise"), "must be non-negative");
    s.finish();
    return c;
}

FitConfig read_fit(Section s) {
    FitConfig f;
    f.model = choice(s, "model", "bi", {"bi", "tri"});
    f.weighting = choice(s, "weighting", "uniform", {"uniform", "variance"});
    f.initialization = choice(s, "initialization", "peel-off", {"peel-off", "rate-grid"});
    f.residual_threshold = s.number("residual_threshold", f.residual_threshold);
    s.finish();
    return f;
}

GeometryConfig read_geometry(Section s) {
    GeometryConfig g;
    g.area = s.quantity("area", Kind::area);
    g.thickness = s.quantity("thickness", Kind::length);
    g.rho0 = s.quantity("rho0", Kind::volume_density);
    g.dipole = s.quantity("dipole", Kind::dipole);
    g.relative_permittivity = s.number("relative_permittivity", 10.0);
    g.capacitance = s.quantity("capacitance", Kind::capacitance);
    g.frequency = s.quantity("frequency", Kind::frequency);
    s.finish();
    return g;
}

MapConfig read_map(Section s) {
    MapConfig m;
    m.coupling = s.opt_grid("coupling", Kind::frequency);
    m.tls_lifetime = s.opt_grid("tls_lifetime", Kind::duration);
    if (auto d = s.opt_map("density")) {
        m.density.law = choice(*d, "law", "fixed", {"fixed", "mergemon"});
        m.density.value = d->opt_quantity("value", Kind::density);
        if (auto g = d->opt_map("geometry")) m.density.geometry = read_geometry(*g);
        d->finish();
    }
    m.offset = choice(s, "offset", "fixed", {"fixed", "averaged"});
    m.offset_fraction = s.number("offset_fraction", 0.5);
    m.intrinsic_decay = s.opt_quantity("intrinsic_decay", Kind::rate);
    s.finish();
    return m;
}

FreqModelConfig read_freq_model(Section s) {
    FreqModelConfig f;
    f.frequencies = s.opt_grid("frequencies", Kind::frequency);
    f.band_edge = s.opt_quantity("band_edge", Kind::frequency);
    f.inside = s.opt_quantity("inside", Kind::rate);
    f.outside = s.opt_quantity("outside", Kind::rate);
    f.coupling_law = choice(s, "coupling_law", "quadratic", {"quadratic", "sqrt"});
    f.coupling_coefficient = s.opt_number("coupling_coefficient");
    f.density = s.opt_quantity("density", Kind::density);
    if (auto r = s.opt_map("readout")) f.readout = read_readout(*r);
    f.offset = choice(s, "offset", "fixed", {"fixed", "averaged"});
    f.offset_fraction = s.number("offset_fraction", 0.5);
    s.finish();
    return f;
}

// ---------------------------------------------------------------------------
// Serialisation through an ordered JSON tree.

json number(double v) { return json(v); }

json grid_json(const GridSpec& g) {
    if (!g.values.empty()) {
        json arr = json::array();
        for (const auto& q : g.values) arr.push_back(q.text());
        return arr;
    }
    json o;
    o["start"] = g.start ? g.start->text() : "";
    o["stop"] = g.stop ? g.stop->text() : "";
    o["count"] = g.count;
    o["spacing"] = g.spacing;
    return o;
}

json readout_json(const ReadoutConfig& r) {
    json o;
    o["frequency"] = r.frequency.text();
    o["kappa"] = r.kappa.text();
    o["coupling"] = r.coupling.text();
    return o;
}

json to_json(const RunConfig& c) {
    json root;
    root["seed"] = c.seed;
    if (c.qubit) {
        json q;
        q["frequency"] = c.qubit->frequency.text();
        if (c.qubit->intrinsic_decay) q["intrinsic_decay"] = c.qubit->intrinsic_decay->text();
        q["p_th"] = number(c.qubit->p_th);
        if (c.qubit->readout) q["readout"] = readout_json(*c.qubit->readout);
        root["qubit"] = q;
    }
    if (c.bath) {
        json b = json::object();
        if (!c.bath->tls.empty()) {
            json arr = json::array();
            for (const auto& t : c.bath->tls) {
                json o;
                o["frequency"] = t.frequency.text();
                o["coupling"] = t.coupling.text();
                o["decay"] = t.decay.text();
                o["count"] = t.count;
                arr.push_back(o);
            }
            b["tls"] = arr;
        }
        if (!c.bath->combs.empty()) {
            json arr = json::array();
            for (const auto& cc : c.bath->combs) {
                json o;
                o["anchor"] = cc.anchor.text();
                o["spacing"] = cc.spacing.text();
                o["half_width"] = cc.half_width;
                o["coupling"] = cc.coupling.text();
                if (cc.decay) o["decay"] = cc.decay->text();
                if (cc.band_edge) {
                    json e;
                    e["edge"] = cc.band_edge->edge.text();
                    e["inside"] = cc.band_edge->inside.text();
                    e["outside"] = cc.band_edge->outside.text();
                    o["band_edge"] = e;
                }
                arr.push_back(o);
            }
            b["combs"] = arr;
        }
        if (c.bath->long_lived) {
            json l;
            l["fraction"] = number(c.bath->long_lived->fraction);
            l["decay"] = c.bath->long_lived->decay.text();
            b["long_lived"] = l;
        }
        if (c.bath->range_min || c.bath->range_max) {
            json r = json::object();
            if (c.bath->range_min) r["min"] = c.bath->range_min->text();
            if (c.bath->range_max) r["max"] = c.bath->range_max->text();
            b["range"] = r;
        }
        root["bath"] = b;
    }
    if (c.sequence) {
        const auto& s = *c.sequence;
        json o;
        o["prepare_frequency"] = s.prepare_frequency.text();
        if (s.interaction_frequency) o["interaction_frequency"] = s.interaction_frequency->text();
        o["pulses"] = s.pulses;
        o["relax_wait"] = s.relax_wait.text();
        o["probe_state"] = s.probe_state;
        if (!s.delays.values.empty() || s.delays.start) o["delays"] = grid_json(s.delays);
        o["detuned_delay"] = s.detuned_delay;
        if (!s.interleave.empty()) {
            json arr = json::array();
            for (const auto& q : s.interleave) arr.push_back(q.text());
            o["interleave"] = arr;
        }
        o["plateau_delay"] = s.plateau_delay.text();
        if (!s.saturation.empty()) o["saturation"] = s.saturation;
        if (s.scan) o["scan"] = grid_json(*s.scan);
        if (s.spectrum) o["spectrum"] = grid_json(*s.spectrum);
        root["sequence"] = o;
    }
    if (c.simulate) {
        json o;
        o["initial_state"] = c.simulate->initial_state;
        if (c.simulate->delays) o["delays"] = grid_json(*c.simulate->delays);
        o["noise"] = number(c.simulate->noise);
        root["simulate"] = o;
    }
    if (c.fit) {
        json o;
        o["model"] = c.fit->model;
        o["weighting"] = c.fit->weighting;
        o["initialization"] = c.fit->initialization;
        o["residual_threshold"] = number(c.fit->residual_threshold);
        root["fit"] = o;
    }
    if (c.map) {
        const auto& m = *c.map;
        json o;
        if (m.coupling) o["coupling"] = grid_json(*m.coupling);
        if (m.tls_lifetime) o["tls_lifetime"] = grid_json(*m.tls_lifetime);
        json d;
        d["law"] = m.density.law;
        if (m.density.value) d["value"] = m.density.value->text();
        if (m.density.geometry) {
            const auto& g = *m.density.geometry;
            json go;
            go["area"] = g.area.text();
            go["thickness"] = g.thickness.text();
            go["rho0"] = g.rho0.text();
            go["dipole"] = g.dipole.text();
            go["relative_permittivity"] = number(g.relative_permittivity);
            go["capacitance"] = g.capacitance.text();
            go["frequency"] = g.frequency.text();
            d["geometry"] = go;
        }
        o["density"] = d;
        o["offset"] = m.offset;
        o["offset_fraction"] = number(m.offset_fraction);
        if (m.intrinsic_decay) o["intrinsic_decay"] = m.intrinsic_decay->text();
        root["map"] = o;
    }
    if (c.freq_model) {
        const auto& f = *c.freq_model;
        json o;
        if (f.frequencies) o["frequencies"] = grid_json(*f.frequencies);
        if (f.band_edge) o["band_edge"] = f.band_edge->text();
        if (f.inside) o["inside"] = f.inside->text();
        if (f.outside) o["outside"] = f.outside->text();
        o["coupling_law"] = f.coupling_law;
        if (f.coupling_coefficient) o["coupling_coefficient"] = number(*f.coupling_coefficient);
        if (f.density) o["density"] = f.density->text();
        if (f.readout) o["readout"] = readout_json(*f.readout);
        o["offset"] = f.offset;
        o["offset_fraction"] = number(f.offset_fraction);
        root["freq_model"] = o;
    }
    return root;
}

void emit_yaml(YAML::Emitter& out, const json& j) {
    switch (j.type()) {
        case json::value_t::object:
            out << YAML::BeginMap;
            for (const auto& [k, v] : j.items()) {
                out << YAML::Key << k << YAML::Value;
                emit_yaml(out, v);
            }
            out << YAML::EndMap;
            break;
        case json::value_t::array: {
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && !v.is_structured();
            if (scalars) out << YAML::Flow;
            out << YAML::BeginSeq;
            for (const auto& v : j) emit_yaml(out, v);
            out << YAML::EndSeq;
            break;
        }
        case json::value_t::string: out << j.get<std::string>(); break;
        case json::value_t::boolean: out << (j.get<bool>() ? "true" : "false"); break;
        case json::value_t::number_integer: out << j.get<long long>(); break;
        case json::value_t::number_unsigned: out << j.get<unsigned long long>(); break;
        case json::value_t::number_float: out << format_double(j.get<double>()); break;
        default: out << YAML::Null; break;
    }
}

double resolved(const Quantity& q, Kind kind, const std::string& path) {
    return guarded(path, [&] { return q.as(kind); });
}

void apply_readout(QubitParams& q, const ReadoutConfig& r, const std::string& path) {
    q.omega_r = resolved(r.frequency, Kind::frequency, join(path, "frequency"));
    q.kappa_r = resolved(r.kappa, Kind::rate, join(path, "kappa"));
    q.g_r = resolved(r.coupling, Kind::frequency, join(path, "coupling"));
}

}  // namespace

std::string Quantity::text() const { return format_double(value) + (unit.empty() ? "" : " " + unit); }

double Quantity::as(Kind kind) const { return units::parse_quantity(text(), kind); }

Quantity Quantity::parse(std::string_view text, Kind kind) {
    units::parse_quantity(text, kind);  // validates number and unit
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) throw std::invalid_argument("'" + s + "' does not start with a number");
    return Quantity{v, trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)))};
}

std::vector<double> GridSpec::resolve(Kind kind) const {
    if (!values.empty()) {
        std::vector<double> out;
        for (const auto& q : values) out.push_back(q.as(kind));
        return out;
    }
    if (!start || !stop || count < 1) throw std::invalid_argument("grid needs start, stop and count");
    const double lo = start->as(kind);
    const double hi = stop->as(kind);
    const auto n = static_cast<std::size_t>(count);
    return spacing == "log" ? log_spaced(lo, hi, n) : linear_spaced(lo, hi, n);
}

RunConfig parse_config(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError("", std::string("malformed document: ") + e.what());
    }
    if (!root.IsDefined() || root.IsNull()) throw ConfigError("", "empty configuration");
    Section s(root, "");
    RunConfig c;
    c.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
    if (auto q = s.opt_map("qubit")) c.qubit = read_qubit(*q);
    if (auto b = s.opt_map("bath")) c.bath = read_bath(*b);
    if (s.has("bath") && !c.bath) c.bath = BathConfig{};
    if (auto q = s.opt_map("sequence")) c.sequence = read_sequence(*q);
    if (auto q = s.opt_map("simulate")) c.simulate = read_simulate(*q);
    if (auto q = s.opt_map("fit")) c.fit = read_fit(*q);
    if (auto q = s.opt_map("map")) c.map = read_map(*q);
    if (auto q = s.opt_map("freq_model")) c.freq_model = read_freq_model(*q);
    s.finish();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open configuration '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config, ConfigFormat format) {
    const json tree = to_json(config);
    if (format == ConfigFormat::json) return tree.dump(2) + "\n";
    YAML::Emitter out;
    emit_yaml(out, tree);
    return std::string(out.c_str()) + "\n";
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(to_json(config).dump()); }

QubitParams make_qubit(const RunConfig& config) {
    if (!config.qubit) throw ConfigError("qubit", "section is required");
    const auto& c = *config.qubit;
    QubitParams q;
    q.omega_q = resolved(c.frequency, Kind::frequency, "qubit.frequency");
    if (c.intrinsic_decay) q.gamma_q = resolved(*c.intrinsic_decay, Kind::rate, "qubit.intrinsic_decay");
    q.p_th = c.p_th;
    if (c.readout) apply_readout(q, *c.readout, "qubit.readout");
    guarded("qubit", [&] { q.validate(); });
    return q;
}

BathSpec make_bath(const RunConfig& config) {
    BathSpec bath;
    if (!config.bath) return bath;
    const auto& c = *config.bath;
    for (std::size_t i = 0; i < c.tls.size(); ++i) {
        const std::string path = "bath.tls[" + std::to_string(i) + "]";
        const auto& t = c.tls[i];
        const BathSpec group =
            resonant_cluster(resolved(t.frequency, Kind::frequency, path + ".frequency"),
                             static_cast<std::size_t>(t.count), resolved(t.coupling, Kind::frequency, path + ".coupling"),
                             resolved(t.decay, Kind::rate, path + ".decay"));
        bath = merge(bath, group);
    }
    for (std::size_t i = 0; i < c.combs.size(); ++i) {
        const std::string path = "bath.combs[" + std::to_string(i) + "]";
        const auto& cc = c.combs[i];
        const double anchor = resolved(cc.anchor, Kind::frequency, path + ".anchor");
        const double spacing = resolved(cc.spacing, Kind::frequency, path + ".spacing");
        const double g = resolved(cc.coupling, Kind::frequency, path + ".coupling");
        const BathSpec comb = guarded(path, [&] {
            if (cc.band_edge) {
                const BandGapProfile profile{
                    resolved(cc.band_edge->edge, Kind::frequency, path + ".band_edge.edge"),
                    resolved(cc.band_edge->inside, Kind::rate, path + ".band_edge.inside"),
                    resolved(cc.band_edge->outside, Kind::rate, path + ".band_edge.outside")};
                return comb_bath(anchor, spacing, cc.half_width, g, profile);
            }
            return comb_bath(anchor, spacing, cc.half_width, g, resolved(*cc.decay, Kind::rate, path + ".decay"));
        });
        bath = merge(bath, comb);
    }
    if (c.long_lived) {
        const double rate = resolved(c.long_lived->decay, Kind::rate, "bath.long_lived.decay");
        bath = guarded("bath.long_lived", [&] { return with_long_lived_fraction(bath, c.long_lived->fraction, rate); });
    }
    if (c.range_min) bath.omega_min = resolved(*c.range_min, Kind::frequency, "bath.range.min");
    if (c.range_max) bath.omega_max = resolved(*c.range_max, Kind::frequency, "bath.range.max");
    guarded("bath", [&] { bath.validate(); });
    return bath;
}

HoleburnSpec make_holeburn(const RunConfig& config) {
    if (!config.sequence) throw ConfigError("sequence", "section is required");
    const QubitParams qubit = make_qubit(config);
    const auto& s = *config.sequence;
    HoleburnSpec h;
    h.omega_0 = resolved(s.prepare_frequency, Kind::frequency, "sequence.prepare_frequency");
    h.omega_q = s.interaction_frequency
                    ? resolved(*s.interaction_frequency, Kind::frequency, "sequence.interaction_frequency")
                    : qubit.omega_q;
    h.n_pulses = s.pulses;
    h.tau_r = resolved(s.relax_wait, Kind::duration, "sequence.relax_wait");
    h.probe_state = parse_qubit_state(s.probe_state);
    if (!s.delays.values.empty() || s.delays.start) {
        h.tau_d_grid = guarded("sequence.delays", [&] { return s.delays.resolve(Kind::duration); });
    }
    h.detuned_delay = s.detuned_delay;
    for (std::size_t i = 0; i < s.interleave.size(); ++i) {
        h.interleave.push_back(
            resolved(s.interleave[i], Kind::frequency, "sequence.interleave[" + std::to_string(i) + "]"));
    }
    h.plateau_delay = resolved(s.plateau_delay, Kind::duration, "sequence.plateau_delay");
    guarded("sequence", [&] { h.validate(); });
    for (std::size_t i = 0; i < s.saturation.size(); ++i) {
        if (s.saturation[i] < 0 || (i > 0 && s.saturation[i] < s.saturation[i - 1])) {
            throw ConfigError("sequence.saturation", "pulse counts must be non-negative and non-decreasing");
        }
    }
    if (s.scan) guarded("sequence.scan", [&] { return s.scan->resolve(Kind::frequency); });
    if (s.spectrum) guarded("sequence.spectrum", [&] { return s.spectrum->resolve(Kind::frequency); });
    return h;
}

FitOptions make_fit_options(const RunConfig& config) {
    FitOptions o;
    if (!config.fit) return o;
    o.weighting = parse_weighting(config.fit->weighting);
    o.initialization = parse_initialization(config.fit->initialization);
    o.residual_threshold = config.fit->residual_threshold;
    if (!(o.residual_threshold > 0.0)) throw ConfigError("fit.residual_threshold", "must be positive");
    return o;
}

MapSpec make_map_spec(const RunConfig& config) {
    MapSpec spec = MapSpec::defaults();
    if (!config.map) return spec;
    const auto& m = *config.map;
    if (m.coupling) spec.g_grid = guarded("map.coupling", [&] { return m.coupling->resolve(Kind::frequency); });
    if (m.tls_lifetime) {
        const auto lifetimes = guarded("map.tls_lifetime", [&] { return m.tls_lifetime->resolve(Kind::duration); });
        spec.gamma_t_grid.clear();
        for (double t : lifetimes) {
            if (!(t > 0.0)) throw ConfigError("map.tls_lifetime", "lifetimes must be positive");
            spec.gamma_t_grid.push_back(1.0 / t);
        }
    }
    spec.density_law = parse_density_law(m.density.law);
    if (m.density.value) spec.rho = resolved(*m.density.value, Kind::density, "map.density.value");
    if (m.density.geometry) {
        const auto& g = *m.density.geometry;
        const std::string p = "map.density.geometry";
        MergemonGeometry geo;
        geo.area = resolved(g.area, Kind::area, p + ".area");
        geo.thickness = resolved(g.thickness, Kind::length, p + ".thickness");
        geo.rho0 = resolved(g.rho0, Kind::volume_density, p + ".rho0");
        geo.dipole = resolved(g.dipole, Kind::dipole, p + ".dipole");
        geo.permittivity = g.relative_permittivity * units::vacuum_permittivity;
        geo.capacitance = resolved(g.capacitance, Kind::capacitance, p + ".capacitance");
        const double omega = resolved(g.frequency, Kind::frequency, p + ".frequency");
        geo.v_zpf = guarded(p, [&] { return MergemonGeometry::zero_point_voltage(omega, geo.capacitance); });
        spec.geometry = geo;
    }
    spec.offset.policy = parse_offset_policy(m.offset);
    spec.offset.offset_fraction = m.offset_fraction;
    if (m.intrinsic_decay) spec.gamma_q = resolved(*m.intrinsic_decay, Kind::rate, "map.intrinsic_decay");
    guarded("map", [&] { spec.validate(); });
    return spec;
}

FreqModelSpec make_freq_model_spec(const RunConfig& config) {
    FreqModelSpec spec = FreqModelSpec::defaults();
    if (config.qubit && config.qubit->readout) apply_readout(spec.qubit, *config.qubit->readout, "qubit.readout");
    if (!config.freq_model) return spec;
    const auto& f = *config.freq_model;
    if (f.frequencies) {
        spec.omega_grid = guarded("freq_model.frequencies", [&] { return f.frequencies->resolve(Kind::frequency); });
    }
    if (f.band_edge) spec.profile.edge = resolved(*f.band_edge, Kind::frequency, "freq_model.band_edge");
    if (f.inside) spec.profile.gamma_inside = resolved(*f.inside, Kind::rate, "freq_model.inside");
    if (f.outside) spec.profile.gamma_outside = resolved(*f.outside, Kind::rate, "freq_model.outside");
    spec.coupling_law = parse_coupling_law(f.coupling_law);
    if (f.coupling_coefficient) {
        spec.coupling_coefficient = *f.coupling_coefficient;
    } else if (spec.coupling_law == CouplingLaw::sqrt) {
        spec.coupling_coefficient = sqrt_coefficient_matching(spec.coupling_coefficient, spec.profile.edge);
    }
    if (f.density) spec.rho = resolved(*f.density, Kind::density, "freq_model.density");
    if (f.readout) apply_readout(spec.qubit, *f.readout, "freq_model.readout");
    spec.offset.policy = parse_offset_policy(f.offset);
    spec.offset.offset_fraction = f.offset_fraction;
    guarded("freq_model", [&] { spec.validate(); });
    return spec;
}

void validate_config(const RunConfig& config) {
    if (config.qubit) make_qubit(config);
    make_bath(config);
    if (config.sequence) make_holeburn(config);
    if (config.simulate && config.simulate->delays) {
        guarded("simulate.delays", [&] { return config.simulate->delays->resolve(Kind::duration); });
    }
    if (config.fit) make_fit_options(config);
    if (config.map) make_map_spec(config);
    if (config.freq_model) make_freq_model_spec(config);
}

}  // namespace tlsbath
