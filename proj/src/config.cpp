#include "zeldovich/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zeldovich/constants.hpp"
#include "zeldovich/errors.hpp"

namespace zeldovich {

using nlohmann::json;

namespace {

struct UnitKind {
    std::vector<std::string> symbols;
    double scale;  // SI value of one symbol unit
    bool prefixable;
};

const std::map<std::string, std::vector<UnitKind>>& unit_table() {
    static const std::map<std::string, std::vector<UnitKind>> table{
        {"F", {{{"F"}, 1.0, true}}},
        {"ohm", {{{"ohm", "Ohm", "Ω"}, 1.0, true}}},
        {"H", {{{"H"}, 1.0, true}}},
        {"V", {{{"V"}, 1.0, true}}},
        {"A", {{{"A"}, 1.0, true}}},
        {"W", {{{"W"}, 1.0, true}}},
        {"Hz", {{{"Hz"}, 1.0, true}}},
        {"s", {{{"s"}, 1.0, true}}},
        {"m", {{{"m"}, 1.0, true}}},
        {"K", {{{"K"}, 1.0, false}}},
        {"degC", {{{"degC", "°C"}, 1.0, false}}},
        {"S/m", {{{"S/m"}, 1.0, true}}},
        {"kg m^2", {{{"kg m^2"}, 1.0, false}}},
        {"N m", {{{"N m"}, 1.0, true}}},
        {"N m s", {{{"N m s"}, 1.0, true}}},
        {"rad", {{{"rad"}, 1.0, true}, {{"deg", "°"}, constants::pi / 180.0, false}}},
    };
    return table;
}

const std::vector<std::pair<std::string, double>>& prefixes() {
    static const std::vector<std::pair<std::string, double>> p{
        {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"µ", 1e-6}, {"m", 1e-3}, {"k", 1e3}, {"M", 1e6}, {"G", 1e9}};
    return p;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Cursor over one JSON object: records which keys were read and every problem found.
class Node {
public:
    Node(const json& j, std::string path, std::vector<std::string>& errors)
        : j_(j), path_(std::move(path)), errors_(errors) {}

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }
    void error(const std::string& key, const std::string& msg) const { errors_.push_back(where(key) + ": " + msg); }

    const json* get(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out, const std::string& unit = "") {
        if (const json* v = get(key)) read_number(*v, where(key), unit, out);
    }

    void integer(const std::string& key, int& out) {
        if (const json* v = get(key)) {
            if (v->is_number_integer() && v->get<long long>() >= std::numeric_limits<int>::min() &&
                v->get<long long>() <= std::numeric_limits<int>::max()) {
                out = v->get<int>();
            } else {
                error(key, "expected an integer");
            }
        }
    }

    void unsigned64(const std::string& key, std::uint64_t& out) {
        if (const json* v = get(key)) {
            if (v->is_number_unsigned()) {
                out = v->get<std::uint64_t>();
            } else if (v->is_number_integer() && v->get<long long>() >= 0) {
                out = static_cast<std::uint64_t>(v->get<long long>());
            } else {
                error(key, "expected a nonnegative integer");
            }
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = get(key)) {
            if (v->is_boolean()) {
                out = v->get<bool>();
            } else {
                error(key, "expected true or false");
            }
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const json* v = get(key)) {
            if (v->is_string()) {
                out = v->get<std::string>();
            } else {
                error(key, "expected a string");
            }
        }
    }

    void numbers(const std::string& key, std::vector<double>& out, const std::string& unit) {
        if (const json* v = get(key)) read_numbers(*v, where(key), unit, out);
    }

    void profile(const std::string& key, Profile& out, const std::string& unit) {
        const json* v = get(key);
        if (!v) return;
        if (v->is_number() || v->is_string()) {
            double x = 0;
            if (read_number(*v, where(key), unit, x)) out = Profile(x);
            return;
        }
        if (!v->is_object()) {
            error(key, "expected a number or {\"f_hz\": [...], \"values\": [...]}");
            return;
        }
        Node p(*v, where(key), errors_);
        std::vector<double> f, values;
        if (!p.has("f_hz") || !p.has("values")) error(key, "profile needs both f_hz and values");
        p.numbers("f_hz", f, "Hz");
        p.numbers("values", values, unit);
        p.finish();
        if (f.empty() || values.empty()) return;
        try {
            out = Profile(f, values);
        } catch (const DomainError& e) {
            error(key, e.what());
        }
    }

    /// Object child; returns false (and records an error) when present but not an object.
    bool child(const std::string& key, const json*& out) {
        out = get(key);
        if (out && !out->is_object()) {
            error(key, "expected an object");
            out = nullptr;
        }
        return out != nullptr;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) errors_.push_back(where(it.key()) + ": unknown key");
        }
    }

    bool read_number(const json& v, const std::string& at, const std::string& unit, double& out) {
        if (v.is_number()) {
            out = v.get<double>();
            return true;
        }
        if (v.is_string()) {
            try {
                out = parse_quantity(v.get<std::string>(), unit);
                return true;
            } catch (const ConfigError& e) {
                errors_.push_back(at + ": " + e.what());
                return false;
            }
        }
        errors_.push_back(at + ": expected a number" + (unit.empty() ? std::string() : " in " + unit));
        return false;
    }

    void read_numbers(const json& v, const std::string& at, const std::string& unit, std::vector<double>& out) {
        if (!v.is_array()) {
            errors_.push_back(at + ": expected an array");
            return;
        }
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            double x = 0;
            if (read_number(v[i], at + "[" + std::to_string(i) + "]", unit, x)) out.push_back(x);
        }
    }

    std::vector<std::string>& errors() { return errors_; }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> used_;
};

void read_circuit(const json& j, const std::string& path, PhaseCircuit& c, std::vector<std::string>& errors) {
    if (!j.is_object()) {
        errors.push_back(path + ": expected an object");
        return;
    }
    Node n(j, path, errors);
    n.string("label", c.label);
    n.number("C", c.C, "F");
    n.number("R0", c.R0, "ohm");
    n.profile("R_M", c.R_M, "ohm");
    n.number("R_i", c.R_i, "ohm");
    n.number("R_var", c.R_var, "ohm");
    n.profile("L0", c.L0, "H");
    n.number("V_i", c.V_i, "V");
    n.number("phase", c.phase, "rad");
    n.finish();
}

void read_cylinder(Node& n, CylinderParams& c) {
    n.number("a", c.a, "m");
    n.number("r_coil", c.r_coil, "m");
    n.number("sigma", c.sigma, "S/m");
    n.number("mu_r", c.mu_r);
    n.integer("mode_m", c.mode_m);
    n.number("coupling_A", c.coupling_A);
    n.number("inertia_J", c.inertia_J, "kg m^2");
    n.finish();
}

void read_event(const json& j, const std::string& path, ScenarioEvent& e, std::vector<std::string>& errors) {
    if (!j.is_object()) {
        errors.push_back(path + ": expected an object");
        return;
    }
    Node n(j, path, errors);
    n.number("time", e.time, "s");
    std::string action;
    n.string("action", action);
    if (!n.has("action")) n.error("action", "required");
    if (!n.has("time")) n.error("time", "required");
    try {
        e.action = event_action_from_string(action);
    } catch (const DomainError& err) {
        if (!action.empty()) n.error("action", err.what());
    }
    const json* v = n.get("value");
    if (!v) {
        n.error("value", "required");
    } else if (e.action == EventAction::set_controller_mode) {
        try {
            e.value = controller_mode_from_string(v->is_string() ? v->get<std::string>() : std::string());
        } catch (const DomainError& err) {
            n.error("value", err.what());
        }
    } else if (v->is_array()) {
        std::vector<double> vals;
        n.read_numbers(*v, n.where("value"), e.action == EventAction::set_R_var ? "ohm" : "Hz", vals);
        if (vals.size() == 3) {
            e.value = std::array<double, 3>{vals[0], vals[1], vals[2]};
        } else {
            n.error("value", "expected one number or three");
        }
    } else {
        double x = 0;
        if (n.read_number(*v, n.where("value"), e.action == EventAction::set_R_var ? "ohm" : "Hz", x)) e.value = x;
    }
    n.finish();
}

void read_simulation(Node& n, Scenario& sc, std::vector<std::string>& errors) {
    const json* sub = nullptr;
    if (n.child("controller", sub)) {
        Node c(*sub, n.where("controller"), errors);
        std::string mode = to_string(sc.controller.mode);
        c.string("mode", mode);
        try {
            sc.controller.mode = controller_mode_from_string(mode);
        } catch (const DomainError& e) {
            c.error("mode", e.what());
        }
        c.number("demand_speed", sc.controller.demand_speed, "Hz");
        c.number("gain", sc.controller.gain, "N m s");
        c.number("torque_cap", sc.controller.torque_cap, "N m");
        c.finish();
    }
    n.number("noise_temperature", sc.noise_temperature, "K");
    n.unsigned64("seed", sc.seed);
    n.number("duration", sc.duration, "s");
    n.number("dt", sc.dt, "s");
    if (const json* ev = n.get("events")) {
        if (!ev->is_array()) {
            n.error("events", "expected an array");
        } else {
            sc.events.assign(ev->size(), ScenarioEvent{});
            for (std::size_t i = 0; i < ev->size(); ++i) {
                read_event((*ev)[i], n.where("events") + "[" + std::to_string(i) + "]", sc.events[i], errors);
            }
        }
    }
    if (n.child("failure", sub)) {
        Node f(*sub, n.where("failure"), errors);
        f.number("max_resistor_power", sc.failure.max_resistor_power, "W");
        f.number("max_current", sc.failure.max_current, "A");
        f.boolean("halt_on_failure", sc.failure.halt_on_failure);
        f.finish();
    }
    if (n.child("waveform_output", sub)) {
        Node w(*sub, n.where("waveform_output"), errors);
        w.boolean("enabled", sc.waveform_output.enabled);
        w.number("sample_rate", sc.waveform_output.sample_rate, "Hz");
        w.finish();
    }
    n.number("initial_speed", sc.initial_speed, "Hz");
    n.number("initial_amplitude", sc.initial_amplitude, "A");
    n.number("trace_interval", sc.trace_interval, "s");
    n.number("measurement_resistance", sc.measurement_resistance, "ohm");
    n.number("local_error_tolerance", sc.local_error_tolerance);
    n.integer("max_step_halvings", sc.max_step_halvings);
    if (n.child("bracket", sub)) {
        Node b(*sub, n.where("bracket"), errors);
        b.number("lo", sc.bracket.lo, "Hz");
        b.number("hi", sc.bracket.hi, "Hz");
        b.finish();
    }
    n.finish();
}

void check_grid(std::vector<std::string>& errors, const std::string& path, double lo, double hi, int points,
                const char* lo_name, const char* hi_name, const char* n_name, bool allow_zero) {
    if (!std::isfinite(lo) || (allow_zero ? lo < 0 : lo <= 0))
        errors.push_back(path + "." + lo_name + (allow_zero ? " must be >= 0" : " must be > 0"));
    if (!(hi > lo) || !std::isfinite(hi)) errors.push_back(path + "." + hi_name + " must be > " + lo_name);
    if (points < 2) errors.push_back(path + "." + n_name + " must be >= 2");
}

}  // namespace

std::string to_string(FitTarget t) { return t == FitTarget::coupling ? "coupling" : "inductance"; }

double parse_quantity(const std::string& text, const std::string& unit) {
    const std::string s = trim(text);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr == s.data()) {
        throw ConfigError("'" + text + "' is not a number");
    }
    const std::string rest = trim(std::string(ptr, s.data() + s.size()));
    if (rest.empty()) return value;
    const auto it = unit_table().find(unit);
    if (it == unit_table().end()) {
        throw ConfigError("'" + text + "': this field is dimensionless");
    }
    for (const auto& kind : it->second) {
        for (const auto& sym : kind.symbols) {
            if (rest == sym) return value * kind.scale;
            if (!kind.prefixable || rest.size() <= sym.size() || rest.compare(rest.size() - sym.size(), sym.size(), sym) != 0)
                continue;
            const std::string pre = rest.substr(0, rest.size() - sym.size());
            for (const auto& [p, factor] : prefixes()) {
                if (pre == p) return value * factor * kind.scale;
            }
        }
    }
    throw ConfigError("'" + text + "': expected a value in " + unit);
}

std::string apply_overrides(const std::string& json_text, const std::vector<std::string>& overrides) {
    if (overrides.empty()) return json_text;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override '" + item + "': expected key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string raw = item.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        json* cur = &doc;
        std::stringstream ss(key);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.')) parts.push_back(part);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto& p = parts[i];
            if (p.empty()) throw ConfigError("override '" + key + "': empty path segment");
            if (cur->is_array()) {
                std::size_t idx = 0;
                const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), idx);
                if (ec != std::errc() || ptr != p.data() + p.size() || idx >= cur->size()) {
                    throw ConfigError("override '" + key + "': '" + p + "' is not a valid index");
                }
                cur = &(*cur)[idx];
            } else if (cur->is_object() || cur->is_null()) {
                cur = &(*cur)[p];
            } else {
                throw ConfigError("override '" + key + "': '" + parts[i - 1] + "' is not an object");
            }
        }
        *cur = value;
    }
    return doc.dump();
}

RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
    const std::string text = apply_overrides(json_text, overrides);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be an object");
    }

    RunConfig cfg;
    std::vector<std::string> errors;
    Node root(doc, "", errors);
    root.string("description", cfg.description);

    if (const json* cs = root.get("circuits")) {
        if (!cs->is_array() || cs->size() != 3) {
            root.error("circuits", "expected an array of three circuits");
        } else {
            for (std::size_t k = 0; k < 3; ++k) {
                read_circuit((*cs)[k], "circuits[" + std::to_string(k) + "]", cfg.circuits[k], errors);
            }
        }
    } else {
        root.error("circuits", "required");
    }

    const json* sub = nullptr;
    if (root.child("cylinder", sub)) {
        Node n(*sub, "cylinder", errors);
        read_cylinder(n, cfg.cylinder);
    }
    if (root.child("temperature", sub)) {
        Node n(*sub, "temperature", errors);
        n.boolean("enabled", cfg.temperature.enabled);
        n.number("T", cfg.temperature.T, "degC");
        n.number("T_ref", cfg.temperature.T_ref, "degC");
        n.number("alpha_T", cfg.temperature.alpha_T);
        n.finish();
    }
    if (root.child("sweep", sub)) {
        Node n(*sub, "sweep", errors);
        n.number("f_min", cfg.sweep.f_min, "Hz");
        n.number("f_max", cfg.sweep.f_max, "Hz");
        n.integer("f_points", cfg.sweep.f_points);
        n.numbers("F", cfg.sweep.F, "Hz");
        n.finish();
    }
    if (root.child("map", sub)) {
        Node n(*sub, "map", errors);
        n.number("f_min", cfg.map.f_min, "Hz");
        n.number("f_max", cfg.map.f_max, "Hz");
        n.integer("f_points", cfg.map.f_points);
        n.number("F_min", cfg.map.F_min, "Hz");
        n.number("F_max", cfg.map.F_max, "Hz");
        n.integer("F_points", cfg.map.F_points);
        n.finish();
    }
    if (root.child("fit", sub)) {
        Node n(*sub, "fit", errors);
        std::string target = to_string(cfg.fit.target);
        n.string("target", target);
        if (target == "coupling") {
            cfg.fit.target = FitTarget::coupling;
        } else if (target == "inductance") {
            cfg.fit.target = FitTarget::inductance;
        } else {
            n.error("target", "expected coupling or inductance");
        }
        n.number("f", cfg.fit.f, "Hz");
        n.number("L_coil", cfg.fit.L_coil, "H");
        if (const json* d = n.get("data")) {
            if (!d->is_array()) {
                n.error("data", "expected an array of [F, value] pairs");
            } else {
                for (std::size_t i = 0; i < d->size(); ++i) {
                    const auto& row = (*d)[i];
                    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
                        n.error("data", "element " + std::to_string(i) + " is not an [F, value] pair");
                        continue;
                    }
                    cfg.fit.data.push_back({row[0].get<double>(), row[1].get<double>()});
                }
            }
        }
        n.finish();
    }
    if (root.child("simulation", sub)) {
        Node n(*sub, "simulation", errors);
        read_simulation(n, cfg.simulation, errors);
    }
    if (root.child("analysis", sub)) {
        Node n(*sub, "analysis", errors);
        auto& a = cfg.analysis;
        n.number("f_lo", a.f_lo, "Hz");
        n.number("f_hi", a.f_hi, "Hz");
        n.integer("order", a.order);
        n.number("output_rate", a.envelope.output_rate, "Hz");
        n.integer("guard", a.envelope.guard);
        n.number("smoothing", a.smoothing, "s");
        n.number("L", a.L, "H");
        n.integer("window_len", a.window_len);
        n.integer("hop", a.hop);
        n.boolean("attenuated_probes", a.attenuated_probes);
        n.finish();
    }
    if (root.child("probes", sub)) {
        for (auto it = sub->begin(); it != sub->end(); ++it) {
            const std::string path = "probes." + it.key();
            if (!it->is_object()) {
                errors.push_back(path + ": expected an object");
                continue;
            }
            Node n(*it, path, errors);
            ProbeCoefficients p;
            n.number("v1", p.v1);
            n.number("v2", p.v2);
            n.number("v3", p.v3);
            n.number("p1", p.p1);
            n.number("p2", p.p2);
            n.number("p3", p.p3);
            n.finish();
            cfg.probes[it.key()] = p;
        }
    }
    root.finish();

    // Range and cross-field checks run even after parse errors so one pass reports everything.
    {
        if (cfg.temperature.enabled) {
            for (auto& c : cfg.circuits) {
                c.R0 = temperature_adjusted_resistance(c.R0, cfg.temperature.T, cfg.temperature.T_ref,
                                                       cfg.temperature.alpha_T);
            }
        }
        cfg.simulation.circuits = cfg.circuits;
        cfg.simulation.cylinder = cfg.cylinder;
        std::set<std::string> seen;
        for (const auto& v : cfg.simulation.violations()) {
            if (seen.insert(v).second) errors.push_back(v);
        }
        check_grid(errors, "sweep", cfg.sweep.f_min, cfg.sweep.f_max, cfg.sweep.f_points, "f_min", "f_max",
                   "f_points", false);
        if (cfg.sweep.F.empty()) errors.emplace_back("sweep.F must list at least one rotor frequency");
        for (double F : cfg.sweep.F)
            if (!(F >= 0) || !std::isfinite(F)) errors.emplace_back("sweep.F values must be finite and >= 0");
        check_grid(errors, "map", cfg.map.f_min, cfg.map.f_max, cfg.map.f_points, "f_min", "f_max", "f_points",
                   false);
        check_grid(errors, "map", cfg.map.F_min, cfg.map.F_max, cfg.map.F_points, "F_min", "F_max", "F_points",
                   true);
        if (!(cfg.fit.f > 0)) errors.emplace_back("fit.f must be > 0");
        if (!(cfg.fit.L_coil > 0)) errors.emplace_back("fit.L_coil must be > 0");
        const auto& a = cfg.analysis;
        if (!(a.f_lo > 0) || !(a.f_hi > a.f_lo)) errors.emplace_back("analysis.f_lo/f_hi must satisfy 0 < f_lo < f_hi");
        if (a.order < 1 || a.order > 20) errors.emplace_back("analysis.order must be in [1, 20]");
        if (!(a.envelope.output_rate >= 0)) errors.emplace_back("analysis.output_rate must be >= 0");
        if (a.envelope.guard < 0) errors.emplace_back("analysis.guard must be >= 0");
        if (!(a.smoothing >= 0)) errors.emplace_back("analysis.smoothing must be >= 0");
        if (!(a.L > 0)) errors.emplace_back("analysis.L must be > 0");
        if (a.window_len < 2 || (a.window_len & (a.window_len - 1)) != 0)
            errors.emplace_back("analysis.window_len must be a power of two");
        if (a.hop < 1 || a.hop > a.window_len) errors.emplace_back("analysis.hop must be in [1, window_len]");
        if (a.attenuated_probes) {
            for (const auto& c : cfg.circuits)
                if (!cfg.probes.count(c.label))
                    errors.push_back("probes." + c.label + ": required when analysis.attenuated_probes is set");
        }
        for (const auto& [label, p] : cfg.probes) {
            if (!std::isfinite(p.v1 + p.v2 + p.v3 + p.p1 + p.p2 + p.p3))
                errors.push_back("probes." + label + ": coefficients must be finite");
        }
    }

    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

}  // namespace zeldovich
