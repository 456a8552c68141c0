#include "miuralab/schroedinger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eigensolver.hpp"
#include "fft.hpp"
#include "miuralab/field_io.hpp"
#include "miuralab/profiles.hpp"
#include "ode.hpp"

namespace miuralab {

using profiles::sech2;

namespace {

constexpr int kSubsteps = 8;
// Where the eigenvector hands over to the Riccati tails, relative to max psi.
constexpr double kSpliceLevel = 1e-4;
constexpr double kBlowupFactor = 10.0;
// Below this gap between the two log-derivatives, -lam^2 counts as an eigenvalue.
constexpr double kWronskianFloor = 1e-8;

std::vector<double> k_squared(const Grid& g) {
    std::vector<double> m(g.modes());
    for (int i = 0; i < g.modes(); ++i) m[i] = g.k(i) * g.k(i);
    return m;
}

std::string describe_history(const std::vector<double>& hist) {
    std::ostringstream os;
    for (std::size_t i = 0; i < hist.size(); ++i) os << (i ? ", " : "") << format_double(hist[i]);
    return os.str();
}

// Sweeps s' = q + lam^2 - s^2 for the log-derivative of the solution that
// decays towards the start node, so the sweep runs in its stable direction.
// Fills s at the nodes passed and returns int_{x_from}^{x_j} s. Stops when
// the solution hits a zero (s leaves through -10 lam in the direction of
// travel), reporting where.
struct LogSweep {
    std::vector<double> s;
    std::vector<double> logint;
    std::optional<double> zero_at;
};

LogSweep log_derivative_sweep(const ode::NodeSweep& sw, const std::vector<double>& qf, double lam, int from,
                              int to) {
    const Grid& g = sw.grid();
    const double ref = from < to ? lam : -lam;
    const double dir = from < to ? 1.0 : -1.0;
    const double H = dir * g.h / kSubsteps;
    LogSweep out{std::vector<double>(g.N, 0.0), std::vector<double>(g.N, 0.0), std::nullopt};
    // Composite Simpson over pairs of substeps; kSubsteps is even so every
    // node closes a pair.
    double acc = 0.0, s0 = ref, s1 = 0.0;
    bool odd = true;
    auto rhs = [&](int i, double d) { return qf[i] - 2.0 * ref * d - d * d; };
    auto step = [&](int i, double& d) {
        double s = ref + d;
        if (!std::isfinite(s) || dir * s < -kBlowupFactor * lam) {
            out.zero_at = sw.x(i);
            return false;
        }
        if (odd) {
            s1 = s;
        } else {
            acc += H / 3.0 * (s0 + 4.0 * s1 + s);
            s0 = s;
        }
        odd = !odd;
        return true;
    };
    auto node = [&](int j, double d) {
        out.logint[j] = acc;
        out.s[j] = ref + d;
    };
    sw.run(from, to, 0.0, rhs, step, node);
    return out;
}

struct GroundStateDetail {
    GroundState gs;
    std::vector<double> log_derivative;  // psi'/psi at the nodes
};

std::variant<GroundStateDetail, NoBoundState> ground_state_detail(const Field& q, double tol) {
    if (!(tol > 0.0)) throw ValidationError("ground-state tolerance must be positive");
    const Grid& g = q.grid();
    const int N = g.N;
    const auto& qs = q.samples();
    double qmin = *std::min_element(qs.begin(), qs.end());
    double qmean = integral(q) / (2.0 * g.L);
    const double sigma = qmin - 0.5;
    const double c = std::max(qmean - sigma, 0.5);

    std::vector<double> k2 = k_squared(g);
    std::vector<double> pre(g.modes());
    for (int m = 0; m < g.modes(); ++m) pre[m] = 1.0 / (k2[m] + c);

    eig::ShiftInvertProblem p;
    p.n = N;
    p.sigma = sigma;
    p.shifted = [&](const std::vector<double>& x, std::vector<double>& y) {
        fft::apply_multiplier(N, k2.data(), x.data(), y.data());
        for (int j = 0; j < N; ++j) y[j] += (qs[j] - sigma) * x[j];
    };
    p.precond = [&](const std::vector<double>& x, std::vector<double>& y) {
        fft::apply_multiplier(N, pre.data(), x.data(), y.data());
    };
    eig::Eigenpairs ep = eig::lowest_eigenpairs(p, 1, 1e-13, 500);
    const double E = ep.values.at(0);
    if (E >= -tol) return NoBoundState{E};

    std::vector<double> psi = ep.vectors[0];
    double sum = 0.0;
    for (double v : psi) sum += v;
    if (sum < 0.0)
        for (double& v : psi) v = -v;

    // Spectral log-derivative in the core, Riccati tails outside it.
    std::vector<double> dpsi(N);
    {
        Spectrum F(g.modes());
        fft::r2c(N, psi.data(), F.data());
        for (int m = 0; m < g.modes(); ++m) F[m] *= cplx(0.0, m == N / 2 ? 0.0 : g.k(m)) / double(N);
        fft::c2r(N, F.data(), dpsi.data());
    }
    const int jmax = static_cast<int>(std::max_element(psi.begin(), psi.end()) - psi.begin());
    const double thr = kSpliceLevel * psi[jmax];
    int jL = jmax, jR = jmax;
    while (jL > 0 && psi[jL - 1] >= thr) --jL;
    while (jR < N - 1 && psi[jR + 1] >= thr) ++jR;
    for (int j = jL; j <= jR; ++j)
        if (!(psi[j] > 0.0)) throw SolverError("ground state changes sign inside its core");

    std::vector<double> s(N, 0.0);
    for (int j = jL; j <= jR; ++j) s[j] = dpsi[j] / psi[j];
    const double lam = std::sqrt(-E);
    ode::NodeSweep sw(g, kSubsteps);
    std::vector<double> qf;
    // With E = -lam^2 the tail equation s' = q - E - s^2 needs only q.
    if (jL > 0 || jR < N - 1) qf = sw.refine(q);
    std::vector<double> log_psi(N);
    for (int j = jL; j <= jR; ++j) log_psi[j] = std::log(psi[j]);
    if (jL > 0) {
        LogSweep t = log_derivative_sweep(sw, qf, lam, 0, jL);
        if (t.zero_at) throw SolverError("ground-state tail reconstruction failed");
        for (int j = 0; j < jL; ++j) {
            log_psi[j] = log_psi[jL] + t.logint[j] - t.logint[jL];
            s[j] = t.s[j];
        }
    }
    if (jR < N - 1) {
        LogSweep t = log_derivative_sweep(sw, qf, lam, N - 1, jR);
        if (t.zero_at) throw SolverError("ground-state tail reconstruction failed");
        for (int j = jR + 1; j < N; ++j) {
            log_psi[j] = log_psi[jR] + t.logint[j] - t.logint[jR];
            s[j] = t.s[j];
        }
    }
    double norm2 = 0.0;
    for (int j = 0; j < N; ++j) {
        psi[j] = std::exp(log_psi[j]);
        norm2 += psi[j] * psi[j];
    }
    double scale = 1.0 / std::sqrt(norm2 * g.h);
    for (double& v : psi) v *= scale;

    GroundStateDetail out{GroundState{E, Field(g, psi), ep.lanczos_iterations}, s};
    double res = eigen_residual(q, out.gs);
    if (res > 1e-8 * (1.0 + std::abs(E)))
        throw SolverError("ground-state residual " + format_double(res) + " above 1e-8 (1+|E0|)");
    return out;
}

Field tanh_field(const Grid& g, double lam) {
    return Field::sample(g, [lam](double x) { return lam * std::tanh(lam * x); });
}

}  // namespace

std::variant<GroundState, NoBoundState> ground_state(const Field& q, double tol) {
    auto d = ground_state_detail(q, tol);
    if (auto* nb = std::get_if<NoBoundState>(&d)) return *nb;
    return std::get<GroundStateDetail>(d).gs;
}

double eigen_residual(const Field& q, const GroundState& gs) {
    require_same_grid(q, gs.psi);
    Field r = -spectral_derivative(gs.psi, 2) + pointwise(q, gs.psi) - gs.energy * gs.psi;
    return sobolev_norm(r, 0.0);
}

SpectrumBelowThresholdError::SpectrumBelowThresholdError(const SpectrumBelowThreshold& i)
    : SolverError("the spectrum is not contained in (-lambda^2, inf) for lambda=" + format_double(i.lambda) +
                  (i.blowup_location ? "; Riccati blowup at x=" + format_double(*i.blowup_location)
                                     : std::string("; -lambda^2 is an eigenvalue"))),
      info(i) {}

NoBoundStateError::NoBoundStateError(const NoBoundState& i)
    : SolverError("potential has no bound state (lowest energy " + format_double(i.lowest_energy) + ")"),
      info(i) {}

std::variant<RiccatiSolution, SpectrumBelowThreshold> riccati_shoot(const Field& q, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("Riccati lambda must be positive");
    const Grid& g = q.grid();
    const int N = g.N, mid = N / 2;
    if (std::abs(q[0]) > 1e-6 || std::abs(q[N - 1]) > 1e-6)
        throw ValidationError("potential must decay below 1e-6 at the box edges");
    ode::NodeSweep sw(g, kSubsteps);
    std::vector<double> qf = sw.refine(q);
    const double lam = lambda;

    // psi_d decays at the left edge, psi_u at the right one. Both are positive
    // exactly when the spectrum lies above -lam^2, and then their Wronskian is
    // nonzero. r is the log-derivative of psi_d + psi_u normalized to agree at
    // x = 0, which is lam tanh(lam x) for q = 0.
    LogSweep d = log_derivative_sweep(sw, qf, lam, 0, N - 1);
    if (d.zero_at) return SpectrumBelowThreshold{lambda, d.zero_at};
    LogSweep u = log_derivative_sweep(sw, qf, lam, N - 1, 0);
    if (u.zero_at) return SpectrumBelowThreshold{lambda, u.zero_at};
    if (!(d.s[mid] - u.s[mid] > kWronskianFloor * lam)) return SpectrumBelowThreshold{lambda, std::nullopt};

    std::vector<double> r(N);
    for (int j = 0; j < N; ++j) {
        double L = (d.logint[j] - d.logint[mid]) - (u.logint[j] - u.logint[mid]);
        double w = L >= 0.0 ? 1.0 / (1.0 + std::exp(-L)) : std::exp(L) / (1.0 + std::exp(L));
        r[j] = w * d.s[j] + (1.0 - w) * u.s[j];
    }
    double center = g.L;
    for (int j = 0; j + 1 < N; ++j)
        if (r[j] <= 0.0 && r[j + 1] > 0.0) {
            center = g.x(j) + g.h * (-r[j]) / (r[j + 1] - r[j]);
            break;
        }
    RiccatiSolution sol{Field(g, r), lambda, center, 0.0};
    double acc = 0.0;
    for (int j = 0; j < N; ++j) {
        double dv = r[j] - lam * std::tanh(lam * (g.x(j) - center));
        acc += dv * dv;
    }
    sol.tail_l2 = std::sqrt(acc * g.h);
    return sol;
}

Branch parse_branch(const std::string& name) {
    if (name == "f-lambda" || name == "f_lambda") return Branch::f_lambda;
    if (name == "f-star" || name == "f_star") return Branch::f_star;
    throw ValidationError("unknown inversion branch: " + name);
}

std::string to_string(Branch b) { return b == Branch::f_lambda ? "f-lambda" : "f-star"; }

ForwardImage forward(Branch branch, const Field& r, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    const Grid& g = r.grid();
    Field rx = spectral_derivative(r, 1);
    std::vector<double> u(g.N);
    const double sign = branch == Branch::f_lambda ? 1.0 : -1.0;
    double rho = 0.0;
    for (int j = 0; j < g.N; ++j) {
        double x = g.x(j);
        double t = lambda * std::tanh(lambda * x);
        double s2 = sech2(lambda * x);
        u[j] = r[j] * r[j] + 2.0 * r[j] * t + sign * rx[j];
        if (branch == Branch::f_star) u[j] -= 2.0 * lambda * lambda * s2;
        rho += r[j] * s2;
    }
    ForwardImage out{Field(g, std::move(u)), std::nullopt};
    if (branch == Branch::f_lambda) out.rho = rho * g.h;
    return out;
}

namespace {

double probe_right(const Field& r) {
    const Grid& g = r.grid();
    int j = static_cast<int>(std::lround((2.0 * g.L - 10.0) / g.h));
    return r[std::clamp(j, 0, g.N - 1)];
}

}  // namespace

InversionResult invert(const Field& target, Branch branch, std::optional<double> lambda, double tol) {
    if (!(tol > 0.0)) throw ValidationError("inversion tolerance must be positive");
    const Grid& g = target.grid();
    if (branch == Branch::f_star) {
        if (lambda) throw ValidationError("the f-star branch determines lambda; do not supply it");
        auto d = ground_state_detail(target, 1e-10);
        if (auto* nb = std::get_if<NoBoundState>(&d)) throw NoBoundStateError(*nb);
        const auto& det = std::get<GroundStateDetail>(d);
        const double lam = std::sqrt(-det.gs.energy);
        std::vector<double> rt(g.N);
        for (int j = 0; j < g.N; ++j) rt[j] = -det.log_derivative[j] - lam * std::tanh(lam * g.x(j));
        InversionResult res{Field(g, std::move(rt)), lam, std::nullopt, Branch::f_star, 0.0, {}};
        res.residual = sobolev_norm(forward(Branch::f_star, res.r_tilde, lam).u - target, -1.0);
        if (res.residual > tol)
            throw SolverError("f-star inversion residual " + format_double(res.residual) + " above tolerance " +
                              format_double(tol));
        return res;
    }
    if (!lambda) throw ValidationError("the f-lambda branch needs lambda");
    const double lam = *lambda;
    auto shot = riccati_shoot(target, lam);
    if (auto* b = std::get_if<SpectrumBelowThreshold>(&shot)) throw SpectrumBelowThresholdError(*b);
    Field r = std::get<RiccatiSolution>(shot).r;
    if (std::abs(probe_right(r) - lam) > 1e-4) r = grow_both_sides(r);
    Field rt = r - tanh_field(g, lam);
    ForwardImage fw = forward(Branch::f_lambda, rt, lam);
    InversionResult res{rt, lam, fw.rho, Branch::f_lambda, sobolev_norm(fw.u - target, -1.0), {}};
    if (res.residual <= tol) return res;
    return newton_refine(target, lam, *fw.rho, rt, tol);
}

double kernel_bump(double x) {
    double t = std::abs(x) - 1.0;
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double kernel_K(double x, double y, const std::optional<Field>& r, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    const double X = lambda * x, Y = lambda * y;
    double ratio = std::cosh(Y) / std::cosh(X);
    double w = ratio * ratio;
    double K = 0.0;
    if ((y < x && x <= 0.0) || (y < 0.0 && 0.0 < x))
        K = kernel_bump(Y) * w;
    else if (x <= y && y <= 0.0)
        K = -(1.0 - kernel_bump(Y)) * w;
    else if (0.0 <= y && y < x)
        K = w;
    if (r && K != 0.0) K *= std::exp(2.0 * antiderivative_at(*r, 0.0, y) - 2.0 * antiderivative_at(*r, 0.0, x));
    return K;
}

Field apply_T(const Field& r, const Field& g, double lambda) {
    require_same_grid(r, g);
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    const Grid& grid = g.grid();
    if (2.0 / lambda >= grid.L) throw ValidationError("kernel cutoff support does not fit in the box");
    ode::NodeSweep sw(grid, kSubsteps);
    std::vector<double> rf = sw.refine(r), gf = sw.refine(g);
    std::vector<double> a(rf.size()), bump_g(rf.size());
    for (std::size_t i = 0; i < rf.size(); ++i) {
        double x = sw.x(static_cast<int>(i));
        a[i] = lambda * std::tanh(lambda * x) + rf[i];
        bump_g[i] = kernel_bump(lambda * x) * gf[i];
    }
    const int N = grid.N, mid = N / 2;
    const int start = std::max(0, static_cast<int>(std::floor((-2.0 / lambda + grid.L) / grid.h)) - 1);
    double v0 = 0.0;
    sw.run(start, mid, 0.0, [&](int i, double y) { return bump_g[i] - 2.0 * a[i] * y; }, {},
           [&](int j, double y) {
               if (j == mid) v0 = y;
           });
    std::vector<double> v(N, 0.0);
    auto rhs = [&](int i, double y) { return gf[i] - 2.0 * a[i] * y; };
    auto store = [&](int j, double y) { v[j] = y; };
    sw.run(mid, N - 1, v0, rhs, {}, store);
    sw.run(mid, 0, v0, rhs, {}, store);
    return Field(grid, std::move(v));
}

Field null_direction(const Field& r, double lambda) {
    Field R = antiderivative(r, 0.0);
    std::vector<double> s(r.size());
    for (int j = 0; j < r.size(); ++j) s[j] = sech2(lambda * r.grid().x(j)) * std::exp(-2.0 * R[j]);
    return Field(r.grid(), std::move(s));
}

InversionResult newton_refine(const Field& target, double lambda, double rho_target, const Field& r_init,
                              double tol, const NewtonOptions& options) {
    require_same_grid(target, r_init);
    if (!(tol > 0.0)) throw ValidationError("Newton tolerance must be positive");
    const Grid& g = target.grid();
    Field s2 = Field::sample(g, [lambda](double x) { return sech2(lambda * x); });
    Field r = r_init;
    std::vector<double> hist;
    for (int it = 0; it <= options.max_iterations; ++it) {
        ForwardImage fw = forward(Branch::f_lambda, r, lambda);
        Field res1 = fw.u - target;
        double res2 = *fw.rho - rho_target;
        double res = sobolev_norm(res1, -1.0) + std::abs(res2);
        hist.push_back(res);
        if (res < tol) return InversionResult{r, lambda, fw.rho, Branch::f_lambda, res, hist};
        const std::size_t n = hist.size();
        if (n >= 3 && hist[n - 1] > hist[n - 2] && hist[n - 2] > hist[n - 3])
            throw SolverError("Newton iteration diverged; residuals: " + describe_history(hist));
        if (it == options.max_iterations) break;
        Field v = apply_T(r, -res1, lambda);
        Field phi = null_direction(r, lambda);
        double alpha = (-res2 - inner_product(v, s2)) / inner_product(phi, s2);
        r += v + alpha * phi;
    }
    throw SolverError("Newton iteration cap reached; residuals: " + describe_history(hist));
}

namespace {

// Fourth-order finite-difference derivative, one-sided near the ends.
std::vector<double> fd_derivative(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(n);
    for (int j = 0; j < n; ++j) {
        if (j >= 2 && j + 2 < n)
            d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h);
        else if (j < 2)
            d[j] = (-25.0 * f[j] + 48.0 * f[j + 1] - 36.0 * f[j + 2] + 16.0 * f[j + 3] - 3.0 * f[j + 4]) / (12.0 * h);
        else
            d[j] = (25.0 * f[j] - 48.0 * f[j - 1] + 36.0 * f[j - 2] - 16.0 * f[j - 3] + 3.0 * f[j - 4]) / (12.0 * h);
    }
    return d;
}

// Cumulative integral from node `mid` by trapezoid with the Euler-Maclaurin
// endpoint correction.
std::vector<double> integrate_from(int mid, const std::vector<double>& f, const std::vector<double>& df, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> I(n, 0.0);
    auto cell = [&](int a, int b) { return 0.5 * h * (f[a] + f[b]) - h * h / 12.0 * (df[b] - df[a]); };
    for (int j = mid + 1; j < n; ++j) I[j] = I[j - 1] + cell(j - 1, j);
    for (int j = mid - 1; j >= 0; --j) I[j] = I[j + 1] - cell(j, j + 1);
    return I;
}

}  // namespace

Field grow_both_sides(const Field& r) {
    const Grid& g = r.grid();
    const int N = g.N, mid = N / 2;
    const std::vector<double>& rv = r.samples();
    std::vector<double> logphi = integrate_from(mid, rv, fd_derivative(rv, g.h), g.h);
    double min_left = *std::min_element(logphi.begin(), logphi.begin() + mid + 1);
    const double C = 10.0 * std::exp(-2.0 * min_left);
    std::vector<double> inv2(N), dinv2(N);
    for (int j = 0; j < N; ++j) {
        inv2[j] = std::exp(-2.0 * logphi[j]);
        dinv2[j] = -2.0 * rv[j] * inv2[j];
    }
    std::vector<double> I = integrate_from(mid, inv2, dinv2, g.h);
    std::vector<double> out(N);
    for (int j = 0; j < N; ++j) {
        double den = C + I[j];
        if (!(den > 0.0)) throw SolverError("reduction of order produced a sign change");
        out[j] = rv[j] + inv2[j] / den;
    }
    return Field(g, std::move(out));
}

}  // namespace miuralab
