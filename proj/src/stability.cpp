#include "miuralab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "miuralab/errors.hpp"
#include "miuralab/field_io.hpp"
#include "miuralab/profiles.hpp"
#include "miuralab/schroedinger.hpp"

namespace miuralab {

using profiles::sech2;

namespace {

constexpr double kMinDerivative = 1e-6;
constexpr int kMaxNewton = 50;
// Newton may not wander further than this from its starting guess.
constexpr double kMaxDisplacement = 5.0;
constexpr double kMaxKinkPerturbation = 0.1;

double psi_w(double z, const WeightConfig& w) { return profiles::eta(z, w.R, w.delta) * sech2(z); }

double dpsi_w(double z, const WeightConfig& w) {
    double s = sech2(z);
    return profiles::eta_x(z, w.R) * s - 2.0 * profiles::eta(z, w.R, w.delta) * s * std::tanh(z);
}

double l2_of(const std::vector<double>& v, double h) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc * h);
}

}  // namespace

double modulation_functional(const KinkField& u, double y, const WeightConfig& w, double* derivative) {
    const Grid& g = u.grid();
    const double lam = u.lambda, c = u.center;
    double Y = 0.0, D = 0.0;
    for (int j = 0; j < g.N; ++j) {
        const double x = g.x(j), z = lam * (x - y);
        const double diff = u.remainder[j] + lam * (std::tanh(lam * (x - c)) - std::tanh(z));
        const double p = psi_w(z, w);
        Y += diff * p;
        if (derivative) D += lam * lam * sech2(z) * p - lam * diff * dpsi_w(z, w);
    }
    if (derivative) *derivative = D * g.h;
    return Y * g.h;
}

ModulationPoint solve_modulation(const KinkField& u, double y_guess, const WeightConfig& w, double tol) {
    if (!(tol > 0.0)) throw ValidationError("modulation tolerance must be positive");
    double y = y_guess;
    ModulationPoint m;
    for (int it = 0; it < kMaxNewton; ++it) {
        double D = 0.0;
        double Y = modulation_functional(u, y, w, &D);
        if (!std::isfinite(Y) || !std::isfinite(D)) throw SolverError("modulation functional is not finite");
        if (std::abs(D) < kMinDerivative)
            throw SolverError("modulation derivative " + format_double(D) +
                              " below threshold: perturbation too large for modulation");
        double step = Y / D;
        y -= step;
        m.iterations = it + 1;
        if (std::abs(y - y_guess) > kMaxDisplacement)
            throw SolverError("modulation Newton iteration diverged from y=" + format_double(y_guess));
        if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(y))) break;
    }
    m.y = y;
    m.residual = std::abs(modulation_functional(u, y, w));
    if (!(m.residual < tol))
        throw SolverError("modulation residual " + format_double(m.residual) + " above tolerance");
    return m;
}

namespace {

Field load_or_render(const ExperimentConfig& cfg, const Grid& g) {
    if (cfg.field_path) {
        Field f = read_field(*cfg.field_path);
        if (!(f.grid() == g)) throw ValidationError("field in " + *cfg.field_path + " is not on the configured grid");
        return f;
    }
    return render_perturbation(cfg.perturbation, g);
}

EvolutionOptions options_for(const ExperimentConfig& cfg, double lambda) {
    EvolutionOptions o;
    o.kink_lambda = lambda;
    o.sponge = cfg.sponge;
    o.edge_tolerance = cfg.tolerances.edge;
    return o;
}

// Per-diagnostic measurements of a kink-frame state u = Q_lambda + w.
class KinkMonitor {
public:
    KinkMonitor(const ExperimentConfig& cfg, const Grid& g, double lambda, bool decay, StabilityReport& rep)
        : cfg_(cfg), g_(g), lam_(lambda), decay_(decay), rep_(rep),
          stepper_(ModelKind::kink_frame, g, cfg.stepping.dt, options_for(cfg, lambda)) {}

    // Returns w_mod so callers can add their own measurements.
    std::vector<double> observe(double t, const Field& w, DiagnosticRow& row) {
        const int N = g_.N;
        const double h = g_.h, lam = lam_;
        KinkField u(lam, 0.0, w);
        ModulationPoint m = solve_modulation(u, y_prev_, cfg_.weights, cfg_.tolerances.modulation);
        m.t = t;
        y_prev_ = m.y;
        const double y = m.y;

        std::vector<double> wm(N), f(N), wt_psi(N);
        double mass = 0.0;
        for (int j = 0; j < N; ++j) {
            const double x = g_.x(j), z = lam * (x - y);
            wm[j] = w[j] + lam * (std::tanh(lam * x) - std::tanh(z));
            mass += profiles::eta(z, cfg_.weights.R, cfg_.weights.delta) * wm[j] * wm[j];
            f[j] = std::sqrt(profiles::eta_x(z, cfg_.weights.R)) * wm[j];
        }
        mass *= h;
        Field wmf(g_, wm), ff(g_, f);
        Field fx = spectral_derivative(ff, 1);
        Field wx = spectral_derivative(wmf, 1);
        double a2 = 0.0, fx2 = 0.0, kato = 0.0, fmax = 0.0;
        for (int j = 0; j < N; ++j) {
            a2 += f[j] * f[j];
            fx2 += fx[j] * fx[j];
            kato += lam * lam * sech2(lam * (g_.x(j) - y)) * wx[j] * wx[j];
            fmax = std::max(fmax, std::abs(f[j]));
        }
        const double virial = (a2 + fx2) * h;
        kato *= h;

        // Instantaneous ydot from d/dt Y(y(t), t) = 0.
        Field wt = stepper_.rhs(w);
        double Yt = 0.0;
        for (int j = 0; j < N; ++j) Yt += wt[j] * psi_w(lam * (g_.x(j) - y), cfg_.weights);
        Yt *= h;
        double D = 0.0;
        modulation_functional(u, y, cfg_.weights, &D);

        if (!rep_.times.empty()) {
            const double dt = t - rep_.times.back();
            vir_acc_ += 0.5 * dt * (virial + rep_.virial_integrand.back());
            kato_acc_ += 0.5 * dt * (kato + rep_.kato_integrand.back());
        }
        rep_.times.push_back(t);
        rep_.modulation.push_back(m);
        rep_.l2.push_back(l2_of(wm, h));
        rep_.weighted_mass.push_back(mass);
        rep_.virial_integrand.push_back(virial);
        rep_.virial_accum.push_back(vir_acc_);
        rep_.kato_integrand.push_back(kato);
        rep_.kato_accum.push_back(kato_acc_);
        rep_.ydot_instant.push_back(-Yt / D);
        eta_l2_.push_back(std::sqrt(a2 * h));
        eta_sup_.push_back(fmax);
        for (int s : {1, 2}) hs_[s].push_back(sobolev_norm(wmf, s));

        if (decay_) {
            const double frame_speed = 2.0 * lam * lam;
            WindowSpec win{(frame_speed - cfg_.weights.gamma) * t, 2.0};
            for (int s : cfg_.sobolev_indices) rep_.windowed_norm[s].push_back(sobolev_norm(wmf, s, win));
            for (double A : cfg_.weights.A_values) {
                double acc = 0.0;
                for (int j = 0; j < N; ++j) {
                    const double x = g_.x(j);
                    acc += profiles::eta(lam * (x - y), cfg_.weights.R, cfg_.weights.delta) *
                           profiles::phi(t, x - frame_speed * t, cfg_.weights.x0, A, cfg_.weights.gamma) * wm[j] *
                           wm[j];
                }
                rep_.phi_weighted[A].push_back(acc * h);
            }
        }

        row.y = y;
        row.eta_mass = mass;
        row.virial_accum = vir_acc_;
        row.kato_accum = kato_acc_;
        return wm;
    }

    // Summary statistics once the run has ended.
    void finish(const Field& w0) {
        StabilityReport& r = rep_;
        const std::size_t n = r.times.size();
        for (std::size_t i = 0; i < n && n >= 2; ++i) {
            std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
            double d = (r.modulation[b].y - r.modulation[a].y) / (r.times[b] - r.times[a]);
            r.modulation[i].ydot_plus2 = d;
            if (i < r.trajectory.diagnostics.size()) r.trajectory.diagnostics[i].ydot_plus2 = d;
        }
        r.initial_l2 = sobolev_norm(w0, 0.0);
        double sup = 0.0;
        for (double v : r.l2) sup = std::max(sup, v);
        r.sup_ratio = r.initial_l2 > 0.0 ? sup / r.initial_l2 : 1.0;
        r.virial_integral = vir_acc_;
        r.kato_integral = kato_acc_;

        double running_min = std::numeric_limits<double>::infinity();
        r.max_mass_increase = 0.0;
        for (double m : r.weighted_mass) {
            if (m - running_min > r.max_mass_increase) r.max_mass_increase = m - running_min;
            running_min = std::min(running_min, m);
        }

        r.ydot_crosscheck = 0.0;
        std::optional<double> C;
        for (std::size_t i = 0; i < n; ++i) {
            if (!r.modulation[i].ydot_plus2) continue;
            double fd = *r.modulation[i].ydot_plus2;
            if (i > 0 && i + 1 < n) r.ydot_crosscheck = std::max(r.ydot_crosscheck, std::abs(fd - r.ydot_instant[i]));
            double a = eta_l2_[i], b = eta_sup_[i];
            if (a > 1e-12) {
                double c = std::abs(fd) / (a + a * b * b);
                C = C ? std::max(*C, c) : c;
            }
        }
        r.ydot_constant = C;

        for (auto& [s, series] : hs_) {
            double n0 = sobolev_norm(w0, s);
            double m = series.empty() ? 0.0 : *std::max_element(series.begin(), series.end());
            r.hs_sup_ratio[s] = n0 > 0.0 ? m / n0 : 1.0;
        }
        for (auto& [s, series] : r.windowed_norm)
            if (!series.empty()) r.decay_factor[s] = series.front() > 1e-14 ? series.back() / series.front() : 0.0;
        for (auto& [A, series] : r.phi_weighted)
            if (!series.empty()) r.phi_ratio[A] = series.front() > 1e-300 ? series.back() / series.front() : 0.0;
    }

private:
    const ExperimentConfig& cfg_;
    Grid g_;
    double lam_;
    bool decay_;
    StabilityReport& rep_;
    Stepper stepper_;
    double y_prev_ = 0.0;
    double vir_acc_ = 0.0, kato_acc_ = 0.0;
    std::vector<double> eta_l2_, eta_sup_;
    std::map<int, std::vector<double>> hs_;
};

void take_trajectory(StabilityReport& rep, Trajectory&& tr) {
    rep.status = tr.status;
    rep.message = tr.message;
    rep.trajectory = std::move(tr);
}

}  // namespace

StabilityReport run_kink_stability(const ExperimentConfig& cfg, bool with_decay) {
    validate(cfg);
    if (cfg.model != ModelKind::kink_frame) throw ValidationError("kink runs need model kink_frame");
    if (!(cfg.weights.gamma < 6.0)) throw ValidationError("decay speed gamma must be below 6");
    const Grid g = cfg.grid();
    const double lam = cfg.profile.lambda;
    Field w0 = load_or_render(cfg, g);
    if (sobolev_norm(w0, 0.0) > kMaxKinkPerturbation)
        throw ValidationError("kink perturbation must have L2 norm at most 0.1");

    StabilityReport rep;
    rep.experiment = with_decay ? "decay" : "kink-stability";
    rep.lambda = lam;
    KinkMonitor mon(cfg, g, lam, with_decay, rep);
    DiagnosticHook hook = [&](double t, const Field& w, DiagnosticRow& row) { mon.observe(t, w, row); };
    take_trajectory(rep, evolve(ModelKind::kink_frame, w0, cfg.stepping, {hook}, options_for(cfg, lam)));
    mon.finish(w0);
    return rep;
}

StabilityReport run_asymptotic_decay(const ExperimentConfig& cfg) { return run_kink_stability(cfg, true); }

StabilityReport run_soliton_pipeline(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.model != ModelKind::kink_frame) throw ValidationError("the soliton pipeline evolves model kink_frame");
    if (cfg.profile.kind != ProfileKind::soliton) throw ValidationError("the soliton pipeline needs a soliton profile");
    const Grid g = cfg.grid();
    const double c = cfg.profile.c;
    // Scaling u -> s^{-2} u(x / s) with s = sqrt(c)/2 takes R_c to R_4.
    const double s = std::sqrt(c) / 2.0;
    const Grid src = make_grid(g.L / s, g.N);

    Field u0_src = Field::zeros(src);
    if (cfg.field_path) {
        u0_src = read_field(*cfg.field_path);
        if (!(u0_src.grid() == src))
            throw ValidationError("field in " + *cfg.field_path + " must live on the grid L=" + format_double(src.L) +
                                  ", N=" + std::to_string(src.N));
    } else {
        ProfileSpec sol = cfg.profile;
        u0_src = render_profile(sol, src) + render_perturbation(cfg.perturbation, src);
    }
    Field u0 = s == 1.0 ? u0_src : rescale(u0_src, s, g).field;
    const double x0w = s * cfg.profile.x0;
    Field R4 = Field::sample(g, [&](double x) { return profiles::soliton(4.0, x - x0w); });
    const double pert = sobolev_norm(u0 - R4, -1.0);
    if (!(pert < 0.1)) throw ValidationError("soliton perturbation must be below 0.1 in H^-1 after rescaling");

    InversionResult inv = invert(u0, Branch::f_star, std::nullopt, cfg.tolerances.invert);
    const double lt = inv.lambda;
    const double cw = 4.0 * lt * lt;

    StabilityReport rep;
    rep.experiment = "soliton-pipeline";
    rep.lambda = lt;
    rep.c = c;
    rep.scale = s;
    rep.lambda_tilde = lt;
    rep.c_tilde = s * s * cw;
    rep.perturbation_hm1 = pert;

    KinkMonitor mon(cfg, g, lt, false, rep);
    DiagnosticHook hook = [&](double t, const Field& w, DiagnosticRow& row) {
        mon.observe(t, w, row);
        const double y = rep.modulation.back().y;
        Field u = forward(Branch::f_star, w, lt).u;
        Field ref = Field::sample(g, [&](double x) { return profiles::soliton(cw, x - y); });
        rep.deviation_hm1.push_back(sobolev_norm(u - ref, -1.0));
        rep.y_kdv.push_back(y + cw * t);
        auto gs = ground_state(u, cfg.tolerances.ground_state);
        auto* b = std::get_if<GroundState>(&gs);
        if (!b) throw SolverError("KdV-side field lost its bound state at t=" + format_double(t));
        rep.lambda_track.push_back(std::sqrt(-b->energy));
    };
    take_trajectory(rep, evolve(ModelKind::kink_frame, inv.r_tilde, cfg.stepping, {hook}, options_for(cfg, lt)));
    mon.finish(inv.r_tilde);
    if (!rep.deviation_hm1.empty())
        rep.sup_deviation_hm1 = *std::max_element(rep.deviation_hm1.begin(), rep.deviation_hm1.end());
    double drift = 0.0;
    for (double l : rep.lambda_track) drift = std::max(drift, std::abs(l - lt));
    rep.lambda_drift = drift;
    return rep;
}

int worker_threads() {
    if (const char* env = std::getenv("MIURA_LAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw ValidationError("MIURA_LAB_THREADS must be a positive integer");
        return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

AprioriReport apriori_check(const std::vector<Field>& family, const std::vector<double>& amplitudes,
                            const ExperimentConfig& cfg) {
    validate(cfg);
    if (family.size() != amplitudes.size()) throw ValidationError("one amplitude label per family member");
    AprioriReport rep;
    rep.members.resize(family.size());
    rep.threads = std::max(1, std::min<int>(worker_threads(), static_cast<int>(family.size())));

    auto run_member = [&](std::size_t i) {
        AprioriMember& m = rep.members[i];
        const Field& u0 = family[i];
        m.amplitude = amplitudes[i];
        m.norm_hm1 = sobolev_norm(u0, -1.0);
        if (u0.max_abs() == 0.0) return;
        // Any lambda <= ||u0||^{-2} is admissible after rescaling.
        const double lam = std::min(1.0, 1.0 / (m.norm_hm1 * m.norm_hm1));
        try {
            m.invert_residual = invert(u0, Branch::f_lambda, lam, cfg.tolerances.invert).residual;
        } catch (const SolverError& e) {
            m.admissible = false;
            m.message = e.what();
        }
        EvolutionOptions opt;
        opt.sponge = cfg.sponge;
        opt.edge_tolerance = cfg.tolerances.edge;
        Trajectory tr = evolve(ModelKind::kdv, u0, cfg.stepping, {}, opt);
        for (const auto& row : tr.diagnostics)
            if (row.hm1) m.sup_hm1 = std::max(m.sup_hm1, *row.hm1);
        m.status = tr.status;
        if (tr.status != RunStatus::completed) m.message = tr.message;
        m.ratio = m.sup_hm1 / (m.norm_hm1 + std::pow(m.norm_hm1, 3));
    };

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < family.size(); i = next++) {
            try {
                run_member(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < rep.threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (const auto& m : rep.members) rep.max_ratio = std::max(rep.max_ratio, m.ratio);
    return rep;
}

}  // namespace miuralab
