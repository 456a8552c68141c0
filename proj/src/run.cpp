#include "miuralab/run.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "miuralab/errors.hpp"
#include "miuralab/field_io.hpp"
#include "miuralab/miura.hpp"
#include "miuralab/quadform.hpp"
#include "miuralab/schroedinger.hpp"

namespace miuralab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put(json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << text;
}

json series(const std::vector<double>& v) { return json(v); }

json coercivity_json(const CoercivityReport& c) {
    json j = {{"form", to_string(c.kind.form)},
              {"metric", to_string(c.metric)},
              {"rank_one", c.rank_one},
              {"min_eigenvalue", c.min_eigenvalue},
              {"L", c.L},
              {"N", c.N},
              {"lanczos_iterations", c.lanczos_iterations}};
    if (c.kind.form != FormKind::B) {
        j["epsilon"] = c.kind.epsilon;
        j["R"] = c.kind.R;
    }
    put(j, "refined_eigenvalue", c.refined_eigenvalue);
    put(j, "refinement_change", c.refinement_change);
    put(j, "claimed_bound", c.claimed_bound);
    return j;
}

Field initial_state(const ExperimentConfig& cfg, const Grid& g) {
    if (cfg.field_path) {
        Field f = read_field(*cfg.field_path);
        if (!(f.grid() == g)) throw ValidationError("field in " + *cfg.field_path + " is not on the configured grid");
        return f;
    }
    Field pert = render_perturbation(cfg.perturbation, g);
    if (cfg.model == ModelKind::kink_frame) return pert;
    return render_profile(cfg.profile, g) + pert;
}

void write_snapshots(const Trajectory& tr, const ExperimentConfig& cfg, const fs::path& dir) {
    for (const auto& s : tr.snapshots) {
        fs::path p = dir / ("snap_" + std::to_string(s.index) + "." + cfg.snapshot_format);
        if (cfg.snapshot_format == "csv")
            write_field_csv(s.field, p.string());
        else
            write_field_json(s.field, p.string());
    }
}

json simulate(const ExperimentConfig& cfg, const fs::path& dir, RunResult& res) {
    const Grid g = cfg.grid();
    Field u0 = initial_state(cfg, g);
    EvolutionOptions opt;
    opt.kink_lambda = cfg.profile.lambda;
    opt.sponge = cfg.sponge;
    opt.edge_tolerance = cfg.tolerances.edge;
    Trajectory tr = evolve(cfg.model, u0, cfg.stepping, {}, opt);
    write_text(dir / "diagnostics.csv", diagnostics_csv(tr.diagnostics));
    write_snapshots(tr, cfg, dir / "snaps");
    res.completed = tr.status == RunStatus::completed;
    json j = {{"status", to_string(tr.status)}, {"message", tr.message}, {"steps", tr.times.size()}};
    if (!tr.diagnostics.empty()) {
        const auto &a = tr.diagnostics.front(), &b = tr.diagnostics.back();
        j["t_final"] = b.t;
        json drift = json::object();
        auto d = [&](const char* k, const std::optional<double>& x, const std::optional<double>& y) {
            if (x && y) drift[k] = std::abs(*y - *x);
        };
        d("P0", a.P0, b.P0);
        d("P1", a.P1, b.P1);
        d("P2", a.P2, b.P2);
        d("P3", a.P3, b.P3);
        j["conservation_drift"] = drift;
    }
    return j;
}

json invert_command(const ExperimentConfig& cfg, const fs::path& dir) {
    const Grid g = cfg.grid();
    Field target = cfg.field_path ? read_field(*cfg.field_path) : render_profile(cfg.profile, g);
    Branch b = parse_branch(cfg.branch);
    InversionResult inv = invert(target, b, cfg.invert_lambda, cfg.tolerances.invert);
    write_text(dir / "diagnostics.csv", diagnostics_csv({}));
    fs::path out = dir / ("r_tilde." + cfg.snapshot_format);
    if (cfg.snapshot_format == "csv")
        write_field_csv(inv.r_tilde, out.string());
    else
        write_field_json(inv.r_tilde, out.string());
    json j = {{"branch", to_string(inv.branch)},
              {"lambda", inv.lambda},
              {"residual", inv.residual},
              {"residual_history", inv.residual_history},
              {"r_tilde", out.filename().string()}};
    put(j, "rho", inv.rho);
    return j;
}

json quadform_command(const ExperimentConfig& cfg, const fs::path& dir) {
    const auto& q = cfg.quadform;
    LiebThirringReport lt = lieb_thirring_report(q.L, q.N);
    json j;
    j["integral"] = lt.integral;
    j["support_left"] = lt.support_left;
    j["bound_exponent_value"] = lt.bound_exponent_value;
    j["e0"] = lt.e0;
    j["rayleigh"] = lt.rayleigh;
    j["overlap_sq"] = lt.overlap_sq;
    j["overlap_lower_bound"] = lt.overlap_lower_bound;
    j["h_min_sampled"] = {{"s", lt.h_min_sampled.s}, {"h", lt.h_min_sampled.h}};
    j["h_min_closed"] = {{"s", lt.h_min_closed.s}, {"h", lt.h_min_closed.h}};
    CoercivityOptions o{q.L, q.N, q.refine};
    QuadFormKind B, hat{FormKind::B_hat, q.epsilon, q.R};
    j["coercivity"] = json::array({coercivity_json(coercivity(B, Metric::L2, true, o)),
                                   coercivity_json(coercivity(B, Metric::H1, true, o)),
                                   coercivity_json(coercivity(hat, Metric::H1, true, o)),
                                   coercivity_json(coercivity(B, Metric::L2, false, o))});
    write_text(dir / "diagnostics.csv", diagnostics_csv({}));
    return j;
}

json identity_command(const ExperimentConfig& cfg, const fs::path& dir) {
    const Grid g = cfg.grid();
    std::mt19937_64 rng(cfg.perturbation.seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    const int modes = g.N / 3;
    auto draw = [&] {
        std::vector<double> a(modes + 1), b(modes + 1);
        for (int m = 0; m <= modes; ++m) {
            double amp = 0.5 / ((1.0 + m) * (1.0 + m));
            a[m] = amp * n01(rng);
            b[m] = amp * n01(rng);
        }
        return Field::sample(g, [&](double x) {
            double s = a[0];
            for (int m = 1; m <= modes; ++m) {
                double k = std::numbers::pi * m / g.L;
                s += a[m] * std::cos(k * x) + b[m] * std::sin(k * x);
            }
            return s;
        });
    };
    std::vector<double> residuals;
    for (int i = 0; i < cfg.identity_pairs; ++i) {
        Field u = draw();
        Field ut = draw();
        residuals.push_back(miura_identity_residual(u, ut));
    }
    write_text(dir / "diagnostics.csv", diagnostics_csv({}));
    return {{"pairs", cfg.identity_pairs},
            {"residuals", residuals},
            {"max_residual", *std::max_element(residuals.begin(), residuals.end())}};
}

json stability_command(const ExperimentConfig& cfg, const fs::path& dir, RunResult& res) {
    StabilityReport r;
    if (cfg.command == "kink-stability")
        r = run_kink_stability(cfg);
    else if (cfg.command == "decay")
        r = run_asymptotic_decay(cfg);
    else
        r = run_soliton_pipeline(cfg);
    write_text(dir / "diagnostics.csv", diagnostics_csv(r.trajectory.diagnostics));
    write_snapshots(r.trajectory, cfg, dir / "snaps");
    res.completed = r.status == RunStatus::completed;
    return to_json(r);
}

json apriori_command(const ExperimentConfig& cfg, const fs::path& dir) {
    const Grid g = cfg.grid();
    Field shape = cfg.field_path ? initial_state(cfg, g) : render_perturbation(cfg.perturbation, g);
    const double a0 = cfg.field_path ? 1.0 : cfg.perturbation.amplitude;
    if (a0 == 0.0) throw ValidationError("apriori family shape has zero amplitude");
    std::vector<Field> family;
    for (double a : cfg.amplitudes) family.push_back((a / a0) * shape);
    AprioriReport r = apriori_check(family, cfg.amplitudes, cfg);
    write_text(dir / "diagnostics.csv", diagnostics_csv({}));
    return to_json(r);
}

}  // namespace

std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows) {
    std::ostringstream out;
    out << "t,P0,P1,P2,P3,l2,hm1,y,ydot_plus2,eta_mass,virial_accum,kato_accum\n";
    auto cell = [&](const std::optional<double>& v) {
        out << ',';
        if (v) out << format_double(*v);
    };
    for (const auto& r : rows) {
        out << format_double(r.t);
        for (const auto* v : {&r.P0, &r.P1, &r.P2, &r.P3, &r.l2, &r.hm1, &r.y, &r.ydot_plus2, &r.eta_mass,
                              &r.virial_accum, &r.kato_accum})
            cell(*v);
        out << '\n';
    }
    return out.str();
}

json to_json(const StabilityReport& r) {
    json j;
    j["experiment"] = r.experiment;
    j["status"] = to_string(r.status);
    j["message"] = r.message;
    j["lambda"] = r.lambda;
    j["initial_l2"] = r.initial_l2;
    j["sup_ratio"] = r.sup_ratio;
    j["virial_integral"] = r.virial_integral;
    j["kato_integral"] = r.kato_integral;
    j["max_mass_increase"] = r.max_mass_increase;
    j["ydot_crosscheck"] = r.ydot_crosscheck;
    put(j, "ydot_constant", r.ydot_constant);
    json hs = json::object(), dec = json::object(), phi = json::object(), win = json::object(),
         phis = json::object();
    for (auto& [s, v] : r.hs_sup_ratio) hs[std::to_string(s)] = v;
    for (auto& [s, v] : r.decay_factor) dec[std::to_string(s)] = v;
    for (auto& [A, v] : r.phi_ratio) phi[format_double(A)] = v;
    for (auto& [s, v] : r.windowed_norm) win[std::to_string(s)] = series(v);
    for (auto& [A, v] : r.phi_weighted) phis[format_double(A)] = series(v);
    j["hs_sup_ratio"] = hs;
    if (!dec.empty()) j["decay_factor"] = dec;
    if (!phi.empty()) j["phi_ratio"] = phi;

    std::vector<double> y, res;
    json ydot = json::array();
    for (const auto& m : r.modulation) {
        y.push_back(m.y);
        res.push_back(m.residual);
        ydot.push_back(m.ydot_plus2 ? json(*m.ydot_plus2) : json(nullptr));
    }
    json s = {{"t", r.times},
              {"y", y},
              {"modulation_residual", res},
              {"ydot_plus2", ydot},
              {"ydot_instant", r.ydot_instant},
              {"l2", r.l2},
              {"weighted_mass", r.weighted_mass},
              {"virial_integrand", r.virial_integrand},
              {"kato_integrand", r.kato_integrand}};
    if (!win.empty()) s["windowed_norm"] = win;
    if (!phis.empty()) s["phi_weighted"] = phis;
    if (r.c) {
        s["deviation_hm1"] = r.deviation_hm1;
        s["y_kdv"] = r.y_kdv;
        s["lambda_track"] = r.lambda_track;
    }
    j["series"] = s;
    put(j, "c", r.c);
    put(j, "c_tilde", r.c_tilde);
    put(j, "lambda_tilde", r.lambda_tilde);
    put(j, "scale", r.scale);
    put(j, "perturbation_hm1", r.perturbation_hm1);
    put(j, "sup_deviation_hm1", r.sup_deviation_hm1);
    put(j, "lambda_drift", r.lambda_drift);
    return j;
}

json to_json(const AprioriReport& r) {
    json members = json::array();
    for (const auto& m : r.members) {
        json e = {{"amplitude", m.amplitude},   {"norm_hm1", m.norm_hm1},     {"sup_hm1", m.sup_hm1},
                  {"ratio", m.ratio},           {"admissible", m.admissible}, {"status", to_string(m.status)},
                  {"message", m.message}};
        put(e, "invert_residual", m.invert_residual);
        members.push_back(e);
    }
    return {{"members", members}, {"max_ratio", r.max_ratio}, {"threads", r.threads}};
}

RunResult execute(const ExperimentConfig& cfg) {
    validate(cfg);
    RunResult res;
    fs::path dir = fs::path(cfg.output_dir) / cfg.name;
    std::error_code ec;
    fs::create_directories(dir / "snaps", ec);
    if (ec) throw ValidationError("cannot create run directory " + dir.string() + ": " + ec.message());
    res.directory = dir.string();
    write_text(dir / "config.json", config_to_json(cfg).dump(2) + "\n");

    const std::string& c = cfg.command;
    json report;
    if (c == "simulate")
        report = simulate(cfg, dir, res);
    else if (c == "invert")
        report = invert_command(cfg, dir);
    else if (c == "quadform")
        report = quadform_command(cfg, dir);
    else if (c == "identity-check")
        report = identity_command(cfg, dir);
    else if (c == "kink-stability" || c == "decay" || c == "soliton-pipeline")
        report = stability_command(cfg, dir, res);
    else if (c == "apriori")
        report = apriori_command(cfg, dir);
    else
        throw ValidationError("unknown command '" + c + "'");
    report["command"] = c;
    write_text(dir / "report.json", report.dump(2) + "\n");
    res.report = std::move(report);
    return res;
}

}  // namespace miuralab
