#include "miuralab/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "miuralab/errors.hpp"

namespace miuralab {

using nlohmann::json;

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> c = {"simulate",       "invert",           "quadform", "identity-check",
                                               "kink-stability", "soliton-pipeline", "apriori",  "decay"};
    return c;
}

PerturbationKind parse_perturbation_kind(const std::string& name) {
    if (name == "none") return PerturbationKind::none;
    if (name == "gaussian") return PerturbationKind::gaussian;
    if (name == "sech") return PerturbationKind::sech;
    if (name == "noise") return PerturbationKind::noise;
    throw ValidationError("unknown perturbation kind '" + name + "'");
}

std::string to_string(PerturbationKind k) {
    switch (k) {
        case PerturbationKind::none: return "none";
        case PerturbationKind::gaussian: return "gaussian";
        case PerturbationKind::sech: return "sech";
        case PerturbationKind::noise: return "noise";
    }
    return "none";
}

namespace {

Normalization parse_normalization(const std::string& s) {
    if (s == "peak") return Normalization::peak;
    if (s == "l2") return Normalization::l2;
    throw ValidationError("unknown normalization '" + s + "' (expected peak or l2)");
}

std::string to_string(Normalization n) { return n == Normalization::peak ? "peak" : "l2"; }

}  // namespace

Field render_perturbation(const PerturbationConfig& p, const Grid& grid) {
    if (p.kind == PerturbationKind::none || p.amplitude == 0.0) return Field::zeros(grid);
    if (!(p.width > 0.0)) throw ValidationError("perturbation width must be positive");
    const double c = p.center, w = p.width;
    Field shape = Field::zeros(grid);
    switch (p.kind) {
        case PerturbationKind::gaussian:
            shape = Field::sample(grid, [&](double x) { return std::exp(-0.5 * (x - c) * (x - c) / (w * w)); });
            break;
        case PerturbationKind::sech:
            shape = Field::sample(grid, [&](double x) { return profiles::sech((x - c) / w); });
            break;
        case PerturbationKind::noise: {
            if (p.modes < 1) throw ValidationError("noise needs at least one mode");
            std::mt19937_64 rng(p.seed);
            std::normal_distribution<double> n01(0.0, 1.0);
            std::vector<double> a(p.modes), b(p.modes);
            for (int m = 0; m < p.modes; ++m) {
                a[m] = n01(rng);
                b[m] = n01(rng);
            }
            shape = Field::sample(grid, [&](double x) {
                double s = 0.0;
                for (int m = 0; m < p.modes; ++m) {
                    double k = (m + 1) / w;
                    s += a[m] * std::cos(k * (x - c)) + b[m] * std::sin(k * (x - c));
                }
                return s * std::exp(-0.5 * (x - c) * (x - c) / (4.0 * w * w));
            });
            break;
        }
        case PerturbationKind::none: break;
    }
    double scale = p.normalization == Normalization::peak ? shape.max_abs() : sobolev_norm(shape, 0.0);
    if (!(scale > 0.0)) throw ValidationError("perturbation shape vanishes on this grid");
    return (p.amplitude / scale) * shape;
}

ExperimentConfig default_config(const std::string& command) {
    if (std::find(known_commands().begin(), known_commands().end(), command) == known_commands().end())
        throw ValidationError("unknown command '" + command + "'");
    ExperimentConfig c;
    c.command = command;
    c.name = command;
    c.stepping = StepConfig{1e-4, 1.0, 100, 0};
    auto kink_run = [&](double t_end) {
        c.model = ModelKind::kink_frame;
        c.stepping = StepConfig{1e-3, t_end, 100, 0};
        c.sponge.enabled = true;
        // Radiation with group velocity -4 - 3k^2 crosses a weaker layer undamped.
        c.sponge.strength = 100.0;
        c.profile.kind = ProfileKind::kink;
        c.perturbation = PerturbationConfig{PerturbationKind::sech, 0.05, 3.0, 1.0, Normalization::l2, 0, 8};
    };
    if (command == "kink-stability") kink_run(20.0);
    if (command == "decay") kink_run(20.0);
    if (command == "soliton-pipeline") {
        kink_run(5.0);
        c.profile.kind = ProfileKind::soliton;
        c.perturbation = PerturbationConfig{PerturbationKind::gaussian, 0.01, 0.0, 1.0, Normalization::peak, 0, 8};
    }
    if (command == "apriori") {
        c.model = ModelKind::kdv;
        c.stepping = StepConfig{1e-3, 10.0, 100, 0};
        c.sponge.enabled = true;
        c.sponge.strength = 100.0;
        c.perturbation = PerturbationConfig{PerturbationKind::gaussian, 1.0, 0.0, 1.0, Normalization::peak, 0, 8};
    }
    if (command == "identity-check") {
        c.L = std::numbers::pi;
        c.N = 64;
    }
    if (command == "invert") c.tolerances.invert = 1e-8;
    return c;
}

namespace {

// Reads one JSON object, remembering which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ValidationError(where() + " must be a JSON object");
    }

    void num(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw mismatch(key, "a number");
            out = v->get<double>();
        }
    }
    void integer(const char* key, int& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) throw mismatch(key, "an integer");
            long long x = v->get<long long>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw mismatch(key, "an integer in int range");
            out = static_cast<int>(x);
        }
    }
    void u64(const char* key, std::uint64_t& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned()) throw mismatch(key, "a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void boolean(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) throw mismatch(key, "true or false");
            out = v->get<bool>();
        }
    }
    void str(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) throw mismatch(key, "a string");
            out = v->get<std::string>();
        }
    }
    template <class E>
    void enumeration(const char* key, E& out, E (*parse)(const std::string&)) {
        std::string s;
        if (peek(key)) {
            str(key, s);
            out = parse(s);
        }
    }
    void optional_num(const char* key, std::optional<double>& out) {
        if (const json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_number()) throw mismatch(key, "a number or null");
            out = v->get<double>();
        }
    }
    void optional_str(const char* key, std::optional<std::string>& out) {
        if (const json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_string()) throw mismatch(key, "a string or null");
            out = v->get<std::string>();
        }
    }
    void num_list(const char* key, std::vector<double>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) throw mismatch(key, "an array of numbers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) throw mismatch(key, "an array of numbers");
                out.push_back(e.get<double>());
            }
        }
    }
    void int_list(const char* key, std::vector<int>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) throw mismatch(key, "an array of integers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number_integer()) throw mismatch(key, "an array of integers");
                out.push_back(e.get<int>());
            }
        }
    }
    void object(const char* key, const std::function<void(Reader&)>& body) {
        if (const json* v = take(key)) {
            Reader sub(*v, path_.empty() ? key : path_ + "." + key);
            body(sub);
            sub.finish();
        }
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ValidationError("unknown configuration key '" + (path_.empty() ? "" : path_ + ".") + it.key() +
                                      "'");
    }

private:
    bool peek(const char* key) const { return j_.contains(key); }
    const json* take(const char* key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }
    std::string where() const { return path_.empty() ? "configuration" : "configuration section '" + path_ + "'"; }
    ValidationError mismatch(const char* key, const char* what) const {
        return ValidationError("configuration key '" + (path_.empty() ? "" : path_ + ".") + key + "' must be " +
                               what);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::string& command) {
    ExperimentConfig c = default_config(command);
    Reader r(j, "");
    std::string cmd = command;
    r.str("command", cmd);
    if (cmd != command)
        throw ValidationError("configuration is for command '" + cmd + "' but '" + command + "' was requested");
    r.str("name", c.name);
    r.str("output_dir", c.output_dir);
    r.enumeration("model", c.model, parse_model);
    r.object("grid", [&](Reader& g) {
        g.num("L", c.L);
        g.integer("N", c.N);
    });
    r.object("stepping", [&](Reader& s) {
        s.num("dt", c.stepping.dt);
        s.num("t_end", c.stepping.t_end);
        s.integer("diagnostic_stride", c.stepping.diagnostic_stride);
        s.integer("snapshot_stride", c.stepping.snapshot_stride);
    });
    r.object("sponge", [&](Reader& s) {
        s.boolean("enabled", c.sponge.enabled);
        s.num("width", c.sponge.width);
        s.num("strength", c.sponge.strength);
    });
    r.object("profile", [&](Reader& p) {
        p.enumeration("kind", c.profile.kind, parse_profile_kind);
        p.num("c", c.profile.c);
        p.num("lambda", c.profile.lambda);
        p.num("x0", c.profile.x0);
    });
    r.object("perturbation", [&](Reader& p) {
        p.enumeration("kind", c.perturbation.kind, parse_perturbation_kind);
        p.num("amplitude", c.perturbation.amplitude);
        p.num("center", c.perturbation.center);
        p.num("width", c.perturbation.width);
        p.enumeration("normalization", c.perturbation.normalization, parse_normalization);
        p.u64("seed", c.perturbation.seed);
        p.integer("modes", c.perturbation.modes);
    });
    r.object("weights", [&](Reader& w) {
        w.num("R", c.weights.R);
        w.num("delta", c.weights.delta);
        w.num("A", c.weights.A);
        w.num("x0", c.weights.x0);
        w.num("gamma", c.weights.gamma);
        w.num_list("A_values", c.weights.A_values);
    });
    r.object("tolerances", [&](Reader& t) {
        t.num("invert", c.tolerances.invert);
        t.num("ground_state", c.tolerances.ground_state);
        t.num("modulation", c.tolerances.modulation);
        t.num("edge", c.tolerances.edge);
    });
    r.optional_str("field_path", c.field_path);
    r.object("invert", [&](Reader& i) {
        i.str("branch", c.branch);
        i.optional_num("lambda", c.invert_lambda);
    });
    r.object("decay", [&](Reader& d) { d.int_list("sobolev_indices", c.sobolev_indices); });
    r.object("apriori", [&](Reader& a) { a.num_list("amplitudes", c.amplitudes); });
    r.object("identity", [&](Reader& i) { i.integer("pairs", c.identity_pairs); });
    r.object("quadform", [&](Reader& q) {
        q.num("L", c.quadform.L);
        q.integer("N", c.quadform.N);
        q.num("epsilon", c.quadform.epsilon);
        q.num("R", c.quadform.R);
        q.boolean("refine", c.quadform.refine);
    });
    r.str("snapshot_format", c.snapshot_format);
    r.finish();
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open configuration file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed configuration file " + path + ": " + e.what());
    }
    return config_from_json(j, command);
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["command"] = c.command;
    j["name"] = c.name;
    j["output_dir"] = c.output_dir;
    j["model"] = to_string(c.model);
    j["grid"] = {{"L", c.L}, {"N", c.N}};
    j["stepping"] = {{"dt", c.stepping.dt},
                     {"t_end", c.stepping.t_end},
                     {"diagnostic_stride", c.stepping.diagnostic_stride},
                     {"snapshot_stride", c.stepping.snapshot_stride}};
    j["sponge"] = {{"enabled", c.sponge.enabled}, {"width", c.sponge.width}, {"strength", c.sponge.strength}};
    j["profile"] = {{"kind", to_string(c.profile.kind)},
                    {"c", c.profile.c},
                    {"lambda", c.profile.lambda},
                    {"x0", c.profile.x0}};
    j["perturbation"] = {{"kind", to_string(c.perturbation.kind)},
                         {"amplitude", c.perturbation.amplitude},
                         {"center", c.perturbation.center},
                         {"width", c.perturbation.width},
                         {"normalization", to_string(c.perturbation.normalization)},
                         {"seed", c.perturbation.seed},
                         {"modes", c.perturbation.modes}};
    j["weights"] = {{"R", c.weights.R},         {"delta", c.weights.delta}, {"A", c.weights.A},
                    {"x0", c.weights.x0},       {"gamma", c.weights.gamma}, {"A_values", c.weights.A_values}};
    j["tolerances"] = {{"invert", c.tolerances.invert},
                       {"ground_state", c.tolerances.ground_state},
                       {"modulation", c.tolerances.modulation},
                       {"edge", c.tolerances.edge}};
    j["field_path"] = c.field_path ? json(*c.field_path) : json(nullptr);
    j["invert"] = {{"branch", c.branch}, {"lambda", c.invert_lambda ? json(*c.invert_lambda) : json(nullptr)}};
    j["decay"] = {{"sobolev_indices", c.sobolev_indices}};
    j["apriori"] = {{"amplitudes", c.amplitudes}};
    j["identity"] = {{"pairs", c.identity_pairs}};
    j["quadform"] = {{"L", c.quadform.L},
                     {"N", c.quadform.N},
                     {"epsilon", c.quadform.epsilon},
                     {"R", c.quadform.R},
                     {"refine", c.quadform.refine}};
    j["snapshot_format"] = c.snapshot_format;
    return j;
}

void validate(const ExperimentConfig& c) {
    if (c.name.empty() || c.name.find('/') != std::string::npos || c.name == "." || c.name == "..")
        throw ValidationError("run name must be a plain directory name");
    make_grid(c.L, c.N);
    if (!(c.stepping.dt > 0.0) || !(c.stepping.t_end > 0.0)) throw ValidationError("dt and t_end must be positive");
    if (c.stepping.diagnostic_stride < 1) throw ValidationError("diagnostic_stride must be >= 1");
    if (c.stepping.snapshot_stride < 0) throw ValidationError("snapshot_stride must be >= 0");
    if (c.sponge.enabled && (!(c.sponge.width > 0.0) || !(c.sponge.strength >= 0.0)))
        throw ValidationError("sponge needs a positive width and a non-negative strength");
    validate(c.profile);
    if (c.perturbation.kind != PerturbationKind::none && !(c.perturbation.width > 0.0))
        throw ValidationError("perturbation width must be positive");
    if (!(c.weights.A > 0.0)) throw ValidationError("weight A must be positive");
    if (!(c.weights.delta > 0.0)) throw ValidationError("weight delta must be positive");
    for (double a : c.weights.A_values)
        if (!(a > 0.0)) throw ValidationError("A_values must be positive");
    for (double t : {c.tolerances.invert, c.tolerances.ground_state, c.tolerances.modulation, c.tolerances.edge})
        if (!(t > 0.0)) throw ValidationError("tolerances must be positive");
    if (c.branch != "f-star" && c.branch != "f-lambda" && c.branch != "f_star" && c.branch != "f_lambda")
        throw ValidationError("branch must be f-star or f-lambda");
    if (c.invert_lambda && !(*c.invert_lambda > 0.0)) throw ValidationError("invert lambda must be positive");
    for (int s : c.sobolev_indices)
        if (s < 0) throw ValidationError("sobolev indices must be non-negative");
    if (c.identity_pairs < 1) throw ValidationError("identity pairs must be >= 1");
    if (!(c.quadform.L > 0.0) || c.quadform.N < 16 || c.quadform.N % 2)
        throw ValidationError("quadform grid needs L > 0 and an even N >= 16");
    if (c.snapshot_format != "json" && c.snapshot_format != "csv")
        throw ValidationError("snapshot format must be json or csv");
}

}  // namespace miuralab
