#include "sddhopf/config.hpp"

#include "sddhopf/errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sddhopf {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

/// Strips a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

/// TOML number or value text to JSON text: drops digit separators and a
/// leading plus sign, which JSON does not accept.
std::string normalize_scalar(std::string v) {
    if (!v.empty() && v.front() == '"') return v;
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const char ch = v[i];
        if (ch == '_') continue;
        if (ch == '+' && (i == 0 || v[i - 1] == '[' || v[i - 1] == ',' || v[i - 1] == ' ')) continue;
        out += ch;
    }
    return out;
}

json parse_value(const std::string& text, bool allow_bare_string) {
    const std::string v = trim(text);
    try {
        return json::parse(normalize_scalar(v));
    } catch (const json::parse_error&) {
        if (allow_bare_string) return v;
        throw;
    }
}

using Setter = std::function<void(RunConfig&, const json&)>;

double as_number(const std::string& key, const json& v) {
    if (!v.is_number()) throw SchemaError(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(key, "must be finite");
    return d;
}

int as_integer(const std::string& key, const json& v) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::round(d) && std::abs(d) < 1e9) return static_cast<int>(d);
    }
    throw SchemaError(key, "must be an integer");
}

bool as_bool(const std::string& key, const json& v) {
    if (!v.is_boolean()) throw SchemaError(key, "must be true or false");
    return v.get<bool>();
}

std::vector<double> as_vector(const std::string& key, const json& v) {
    if (!v.is_array()) throw SchemaError(key, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(key, e));
    return out;
}

struct Field {
    bool required;
    Setter set;
};

const std::map<std::string, Field>& schema() {
    static const std::map<std::string, Field> fields = [] {
        std::map<std::string, Field> m;
        auto param = [&](const char* key, double GoodwinParameters::*member) {
            m[key] = {true, [key, member](RunConfig& c, const json& v) { c.params.*member = as_number(key, v); }};
        };
        param("mu_m", &GoodwinParameters::mu_m);
        param("mu_p", &GoodwinParameters::mu_p);
        param("mu_e", &GoodwinParameters::mu_e);
        param("alpha_m", &GoodwinParameters::alpha_m);
        param("alpha_p", &GoodwinParameters::alpha_p);
        param("alpha_e", &GoodwinParameters::alpha_e);
        param("c", &GoodwinParameters::c);
        param("z_tilde", &GoodwinParameters::z_tilde);
        param("eps0", &GoodwinParameters::eps0);
        m["h"] = {true, [](RunConfig& c, const json& v) { c.params.h = as_integer("h", v); }};

        auto number = [&](const char* key, double RunOptions::*member) {
            m[key] = {false, [key, member](RunConfig& c, const json& v) { c.options.*member = as_number(key, v); }};
        };
        auto integer = [&](const char* key, int RunOptions::*member) {
            m[key] = {false, [key, member](RunConfig& c, const json& v) { c.options.*member = as_integer(key, v); }};
        };
        auto optional = [&](const char* key, std::optional<double> RunOptions::*member) {
            m[key] = {false, [key, member](RunConfig& c, const json& v) {
                          if (v.is_null()) c.options.*member = std::nullopt;
                          else c.options.*member = as_number(key, v);
                      }};
        };
        number("t0", &RunOptions::t0);
        number("t1", &RunOptions::t1);
        number("step", &RunOptions::step);
        m["x0"] = {false, [](RunConfig& c, const json& v) {
                       if (v.is_null()) {
                           c.options.x0 = std::nullopt;
                           return;
                       }
                       auto x = as_vector("x0", v);
                       if (x.size() != 3) throw SchemaError("x0", "must have three components");
                       c.options.x0 = std::move(x);
                   }};
        m["frozen"] = {false, [](RunConfig& c, const json& v) { c.options.frozen = as_bool("frozen", v); }};
        optional("crossing_alpha", &RunOptions::crossing_alpha);
        optional("crossing_beta", &RunOptions::crossing_beta);
        optional("delta", &RunOptions::delta);
        number("omega_half", &RunOptions::omega_half);
        integer("min_depth", &RunOptions::min_depth);
        integer("max_depth", &RunOptions::max_depth);
        number("alpha_max", &RunOptions::alpha_max);
        integer("grid_points", &RunOptions::grid_points);
        number("fd_step", &RunOptions::fd_step);
        number("t_end", &RunOptions::t_end);
        number("perturbation", &RunOptions::perturbation);
        number("transient_fraction", &RunOptions::transient_fraction);
        integer("returns", &RunOptions::returns);
        integer("samples", &RunOptions::samples);
        number("max_return_spread", &RunOptions::max_return_spread);
        number("max_closure", &RunOptions::max_closure);
        integer("fourier_modes", &RunOptions::fourier_modes);
        number("branch_lo", &RunOptions::branch_lo);
        number("branch_hi", &RunOptions::branch_hi);
        integer("branch_points", &RunOptions::branch_points);
        number("tau_sup", &RunOptions::tau_sup);
        number("tau_dot_sup", &RunOptions::tau_dot_sup);
        number("xdot_sup", &RunOptions::xdot_sup);
        return m;
    }();
    return fields;
}

void check_options(const RunOptions& o) {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw SchemaError(field, what);
    };
    require(o.step > 0.0, "step", "must be positive");
    require(o.omega_half > 0.0, "omega_half", "must be positive");
    require(o.min_depth >= 0 && o.min_depth <= o.max_depth, "min_depth", "must lie in [0, max_depth]");
    require(o.max_depth >= 1 && o.max_depth <= 60, "max_depth", "must lie in [1, 60]");
    require(!o.delta || *o.delta > 0.0, "delta", "must be positive");
    require(o.alpha_max > 0.0, "alpha_max", "must be positive");
    require(o.grid_points >= 2, "grid_points", "must be at least 2");
    require(o.fd_step > 0.0, "fd_step", "must be positive");
    require(o.t_end > 0.0, "t_end", "must be positive");
    require(o.perturbation > 0.0, "perturbation", "must be positive");
    require(o.transient_fraction >= 0.0 && o.transient_fraction < 1.0, "transient_fraction", "must lie in [0, 1)");
    require(o.returns >= 1, "returns", "must be at least 1");
    require(o.samples >= 4, "samples", "must be at least 4");
    require(o.max_return_spread > 0.0, "max_return_spread", "must be positive");
    require(o.max_closure > 0.0, "max_closure", "must be positive");
    require(o.fourier_modes >= 0, "fourier_modes", "must be nonnegative");
    require(o.branch_points >= 1, "branch_points", "must be at least 1");
    require(o.branch_lo <= o.branch_hi, "branch_lo", "must not exceed branch_hi");
    require(o.tau_sup >= 0.0, "tau_sup", "must be nonnegative");
    require(o.tau_dot_sup >= 0.0, "tau_dot_sup", "must be nonnegative");
    require(o.xdot_sup >= 0.0, "xdot_sup", "must be nonnegative");
}

}  // namespace

json parse_flat_toml(const std::string& text) {
    json out = json::object();
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const auto where = "line " + std::to_string(line_no);
        if (line.front() == '[') throw ParseError(where + ": tables are not supported");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
        if (key.empty()) throw ParseError(where + ": empty key");
        if (out.contains(key)) throw ParseError(where + ": duplicate key '" + key + "'");
        try {
            out[key] = parse_value(line.substr(eq + 1), false);
        } catch (const json::parse_error&) {
            throw ParseError(where + ": malformed value for '" + key + "'");
        }
    }
    return out;
}

RunConfig config_from_json(const json& doc, const std::vector<std::string>& overrides) {
    if (!doc.is_object()) throw ParseError("config document must be an object");
    json values = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;

    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("override '" + ov + "' must have the form key=value");
        const std::string key = trim(ov.substr(0, eq));
        values[key] = parse_value(ov.substr(eq + 1), true);
    }

    const auto& fields = schema();
    for (const auto& [key, v] : values.items()) {
        (void)v;
        if (!fields.count(key)) throw SchemaError(key, "unknown key");
    }

    RunConfig cfg;
    for (const auto& [key, field] : fields) {
        if (!values.contains(key)) {
            if (field.required) throw SchemaError(key, "is required");
            continue;
        }
        field.set(cfg, values[key]);
    }
    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const auto sp = msg.find(' ');
        throw SchemaError(msg.substr(0, sp), sp == std::string::npos ? msg : msg.substr(sp + 1));
    }
    check_options(cfg.options);
    return cfg;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
    json doc;
    if (toml) {
        doc = parse_flat_toml(text);
    } else {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            const bool json_ext = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
            if (json_ext) throw ParseError("malformed JSON in '" + path + "': " + e.what());
            doc = parse_flat_toml(text);
        }
    }
    RunConfig cfg = config_from_json(doc, overrides);
    cfg.source = path;
    return cfg;
}

json to_json(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto& o = cfg.options;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j = {
        {"mu_m", p.mu_m}, {"mu_p", p.mu_p}, {"mu_e", p.mu_e}, {"alpha_m", p.alpha_m}, {"alpha_p", p.alpha_p},
        {"alpha_e", p.alpha_e}, {"c", p.c}, {"z_tilde", p.z_tilde}, {"h", p.h}, {"eps0", p.eps0},
        {"t0", o.t0}, {"t1", o.t1}, {"step", o.step}, {"frozen", o.frozen},
        {"crossing_alpha", opt(o.crossing_alpha)}, {"crossing_beta", opt(o.crossing_beta)}, {"delta", opt(o.delta)},
        {"omega_half", o.omega_half}, {"min_depth", o.min_depth}, {"max_depth", o.max_depth},
        {"alpha_max", o.alpha_max}, {"grid_points", o.grid_points}, {"fd_step", o.fd_step},
        {"t_end", o.t_end}, {"perturbation", o.perturbation}, {"transient_fraction", o.transient_fraction},
        {"returns", o.returns}, {"samples", o.samples}, {"max_return_spread", o.max_return_spread},
        {"max_closure", o.max_closure}, {"fourier_modes", o.fourier_modes}, {"branch_lo", o.branch_lo},
        {"branch_hi", o.branch_hi}, {"branch_points", o.branch_points}, {"tau_sup", o.tau_sup},
        {"tau_dot_sup", o.tau_dot_sup}, {"xdot_sup", o.xdot_sup},
    };
    j["x0"] = o.x0 ? json(*o.x0) : json(nullptr);
    return j;
}

}  // namespace sddhopf
