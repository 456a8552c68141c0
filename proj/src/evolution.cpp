#include "miuralab/evolution.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "miuralab/errors.hpp"
#include "miuralab/field_io.hpp"
#include "miuralab/profiles.hpp"

namespace miuralab {

ModelKind parse_model(const std::string& name) {
    if (name == "kdv") return ModelKind::kdv;
    if (name == "mkdv") return ModelKind::mkdv;
    if (name == "kink_frame") return ModelKind::kink_frame;
    throw ValidationError("unknown model: " + name);
}

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::kdv: return "kdv";
        case ModelKind::mkdv: return "mkdv";
        case ModelKind::kink_frame: return "kink_frame";
    }
    return "kdv";
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blowup: return "blowup";
        case RunStatus::edge_contamination: return "edge_contamination";
        case RunStatus::hook_failure: return "hook_failure";
    }
    return "completed";
}

Stepper::Stepper(ModelKind model, const Grid& grid, double dt, const EvolutionOptions& options)
    : model_(model), grid_(grid), dt_(dt), opt_(options) {
    if (!(dt > 0.0)) throw ValidationError("time step must be positive");
    if (model == ModelKind::kink_frame && !(opt_.kink_lambda > 0.0))
        throw ValidationError("kink lambda must be positive");
    if (opt_.sponge.enabled && !(opt_.sponge.width > 0.0 && opt_.sponge.strength >= 0.0))
        throw ValidationError("sponge needs positive width and nonnegative strength");
    const int N = grid.N;
    M_ = (model == ModelKind::kdv && N % 4 == 0) ? 3 * N / 2 : 2 * N;
    const int modes = grid.modes();
    const double lam = opt_.kink_lambda;

    lin_.resize(modes);
    for (int m = 0; m < modes; ++m) {
        double k = grid.k(m);
        double im = k * k * k;
        if (model == ModelKind::kink_frame) im += 4.0 * lam * lam * k;
        lin_[m] = (m == N / 2) ? cplx(0.0, 0.0) : cplx(0.0, im);
    }

    // Contour-integral evaluation of the phi-functions (full circle, complex L).
    const int P = opt_.contour_points;
    E_.resize(modes);
    E2_.resize(modes);
    Q_.resize(modes);
    f1_.resize(modes);
    f2_.resize(modes);
    f3_.resize(modes);
    for (int m = 0; m < modes; ++m) {
        cplx z0 = dt * lin_[m];
        E_[m] = std::exp(z0);
        E2_[m] = std::exp(0.5 * z0);
        cplx q(0), a(0), b(0), c(0);
        for (int j = 0; j < P; ++j) {
            cplx z = z0 + std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / P);
            cplx ez = std::exp(z), ez2 = std::exp(0.5 * z);
            cplx z3 = z * z * z;
            q += (ez2 - 1.0) / z;
            a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
            b += (2.0 + z + ez * (z - 2.0)) / z3;
            c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
        }
        Q_[m] = dt * q / double(P);
        f1_[m] = dt * a / double(P);
        f2_[m] = dt * b / double(P);
        f3_[m] = dt * c / double(P);
    }

    double hf = 2.0 * grid.L / M_;
    if (model == ModelKind::kink_frame) {
        sech2_fine_.resize(M_);
        tanh_fine_.resize(M_);
        for (int j = 0; j < M_; ++j) {
            double xi = -grid.L + j * hf;
            sech2_fine_[j] = profiles::sech2(lam * xi);
            tanh_fine_[j] = std::tanh(lam * xi);
        }
    }
    if (opt_.sponge.enabled) {
        sponge_fine_.resize(M_);
        for (int j = 0; j < M_; ++j) sponge_fine_[j] = sponge(-grid.L + j * hf);
    }
    work_.resize(2 * M_);
    pad_.resize(M_ / 2 + 1);
}

double Stepper::sponge(double x) const {
    if (!opt_.sponge.enabled) return 0.0;
    double d = std::min(x + grid_.L, grid_.L - x);
    if (d < 0.0) d = 0.0;
    if (d >= opt_.sponge.width) return 0.0;
    double c = std::cos(0.5 * std::numbers::pi * d / opt_.sponge.width);
    return opt_.sponge.strength * c * c;
}

Spectrum Stepper::nonlinear(const Spectrum& v) const {
    const int N = grid_.N;
    const int M = M_;
    const double lam = opt_.kink_lambda;
    std::fill(pad_.begin(), pad_.end(), cplx(0.0, 0.0));
    for (int m = 0; m < N / 2; ++m) pad_[m] = v[m];
    double* u = work_.data();
    double* s = work_.data() + M;
    fft::c2r(M, pad_.data(), u);
    for (int j = 0; j < M; ++j) u[j] /= N;

    const bool sp = opt_.sponge.enabled;
    for (int j = 0; j < M; ++j) {
        double w = u[j];
        if (sp) s[j] = -sponge_fine_[j] * w;
        switch (model_) {
            case ModelKind::kdv: u[j] = 3.0 * w * w; break;
            case ModelKind::mkdv: u[j] = 2.0 * w * w * w; break;
            case ModelKind::kink_frame:
                u[j] = -(6.0 * lam * lam * sech2_fine_[j] * w - 6.0 * lam * tanh_fine_[j] * w * w -
                         2.0 * w * w * w);
                break;
        }
    }
    Spectrum out(grid_.modes(), cplx(0.0, 0.0));
    fft::r2c(M, u, pad_.data());
    const double scale = static_cast<double>(N) / M;
    for (int m = 0; m < N / 2; ++m) out[m] = cplx(0.0, grid_.k(m)) * pad_[m] * scale;
    if (sp) {
        fft::r2c(M, s, pad_.data());
        for (int m = 0; m < N / 2; ++m) out[m] += pad_[m] * scale;
    }
    return out;
}

void Stepper::step(Spectrum& v) const {
    const int n = grid_.modes();
    Spectrum Nv = nonlinear(v);
    Spectrum a(n), b(n), c(n);
    for (int m = 0; m < n; ++m) a[m] = E2_[m] * v[m] + Q_[m] * Nv[m];
    Spectrum Na = nonlinear(a);
    for (int m = 0; m < n; ++m) b[m] = E2_[m] * v[m] + Q_[m] * Na[m];
    Spectrum Nb = nonlinear(b);
    for (int m = 0; m < n; ++m) c[m] = E2_[m] * a[m] + Q_[m] * (2.0 * Nb[m] - Nv[m]);
    Spectrum Nc = nonlinear(c);
    for (int m = 0; m < n; ++m)
        v[m] = E_[m] * v[m] + f1_[m] * Nv[m] + 2.0 * f2_[m] * (Na[m] + Nb[m]) + f3_[m] * Nc[m];
    v[grid_.N / 2] = 0.0;
}

Field Stepper::rhs(const Field& u) const {
    Spectrum v = to_spectrum(u);
    v[grid_.N / 2] = 0.0;
    Spectrum nl = nonlinear(v);
    for (int m = 0; m < grid_.modes(); ++m) nl[m] += lin_[m] * v[m];
    return from_spectrum(grid_, nl);
}

Field kdv_side(const Field& u, ModelKind model, double lambda) {
    if (model != ModelKind::kink_frame) return u;
    const Grid& g = u.grid();
    Field ux = spectral_derivative(u, 1);
    std::vector<double> s(g.N);
    for (int j = 0; j < g.N; ++j)
        s[j] = ux[j] + 2.0 * lambda * std::tanh(lambda * g.x(j)) * u[j] + u[j] * u[j];
    return Field(g, std::move(s));
}

Conserved conserved_quantities(const Field& u, ModelKind model) {
    Conserved c;
    const Grid& g = u.grid();
    double p0 = 0.0, p1 = 0.0;
    for (int j = 0; j < g.N; ++j) {
        p0 += u[j];
        p1 += u[j] * u[j];
    }
    c.P0 = p0 * g.h;
    c.P1 = p1 * g.h;
    if (model == ModelKind::mkdv) return c;
    Field ux = spectral_derivative(u, 1);
    Field uxx = spectral_derivative(u, 2);
    double p2 = 0.0, p3 = 0.0;
    for (int j = 0; j < g.N; ++j) {
        double v = u[j], d = ux[j], dd = uxx[j];
        p2 += d * d + 2.0 * v * v * v;
        p3 += dd * dd + kP3CubicCoefficient * v * d * d + kP3QuarticCoefficient * v * v * v * v;
    }
    c.P2 = p2 * g.h;
    c.P3 = p3 * g.h;
    return c;
}

namespace {

bool all_finite(const std::vector<double>& s) {
    for (double v : s)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

Trajectory evolve(ModelKind model, const Field& initial, const StepConfig& cfg,
                  const std::vector<DiagnosticHook>& hooks, const EvolutionOptions& options) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw ValidationError("dt and t_end must be positive");
    if (cfg.diagnostic_stride < 1) throw ValidationError("diagnostic_stride must be >= 1");
    if (cfg.snapshot_stride < 0) throw ValidationError("snapshot_stride must be >= 0");
    const Grid& g = initial.grid();
    const long nsteps = std::max<long>(1, std::lround(cfg.t_end / cfg.dt));
    const double dt = cfg.t_end / nsteps;
    Stepper stepper(model, g, dt, options);

    Trajectory tr;
    tr.model = model;
    Spectrum v = to_spectrum(initial);
    v[g.N / 2] = 0.0;

    auto record = [&](long n) -> bool {
        double t = n * dt;
        std::vector<double> s(g.N);
        fft::c2r(g.N, v.data(), s.data());
        for (double& x : s) x /= g.N;
        DiagnosticRow row;
        row.t = t;
        if (!all_finite(s)) {
            tr.status = RunStatus::blowup;
            tr.message = "non-finite sample at t=" + format_double(t);
            tr.times.push_back(t);
            tr.diagnostics.push_back(row);
            return false;
        }
        Field state(g, std::move(s));
        Conserved c = conserved_quantities(kdv_side(state, model, options.kink_lambda),
                                           model == ModelKind::mkdv ? ModelKind::mkdv : ModelKind::kdv);
        row.P0 = c.P0;
        row.P1 = c.P1;
        row.P2 = c.P2;
        row.P3 = c.P3;
        row.l2 = sobolev_norm(state, 0.0);
        row.hm1 = sobolev_norm(state, -1.0);
        try {
            for (const auto& hook : hooks) hook(t, state, row);
        } catch (const SolverError& e) {
            tr.status = RunStatus::hook_failure;
            tr.message = e.what();
            tr.times.push_back(t);
            tr.diagnostics.push_back(row);
            tr.final_state = state;
            return false;
        }
        tr.times.push_back(t);
        tr.diagnostics.push_back(row);
        double edge = std::max(std::abs(state[0]), std::abs(state[g.N - 1]));
        if (edge > options.edge_tolerance) {
            tr.status = RunStatus::edge_contamination;
            tr.message = "amplitude " + format_double(edge) + " at the box edge at t=" + format_double(t);
            tr.final_state = state;
            return false;
        }
        if (cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0)
            tr.snapshots.push_back({static_cast<int>(n / cfg.snapshot_stride), t, state});
        tr.final_state = std::move(state);
        return true;
    };

    if (!record(0)) return tr;
    for (long n = 1; n <= nsteps; ++n) {
        stepper.step(v);
        bool diag = (n % cfg.diagnostic_stride == 0) || n == nsteps;
        bool snap = cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0;
        if (diag || snap) {
            if (!record(n)) return tr;
        }
    }
    return tr;
}

}  // namespace miuralab
