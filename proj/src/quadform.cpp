#include "miuralab/quadform.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "eigensolver.hpp"
#include "fft.hpp"
#include "miuralab/errors.hpp"
#include "miuralab/profiles.hpp"
#include "miuralab/schroedinger.hpp"

namespace miuralab {

using profiles::sech2;

namespace {

constexpr double kLiebThirring = 567.0 / 320.0;

double bare_potential(double x) { return profiles::quadform_potential(x); }

}  // namespace

FormKind parse_form_kind(const std::string& name) {
    if (name == "B") return FormKind::B;
    if (name == "B_eps_R") return FormKind::B_eps_R;
    if (name == "B_hat") return FormKind::B_hat;
    throw ValidationError("unknown quadratic form '" + name + "' (expected B, B_eps_R or B_hat)");
}

std::string to_string(FormKind kind) {
    switch (kind) {
        case FormKind::B: return "B";
        case FormKind::B_eps_R: return "B_eps_R";
        case FormKind::B_hat: return "B_hat";
    }
    return "B";
}

void validate(const QuadFormKind& kind) {
    if (kind.form == FormKind::B) return;
    if (!(kind.epsilon > 0.0) || !std::isfinite(kind.epsilon)) throw ValidationError("epsilon must be positive");
    if (!std::isfinite(kind.R)) throw ValidationError("R must be finite");
}

Metric parse_metric(const std::string& name) {
    if (name == "L2" || name == "l2") return Metric::L2;
    if (name == "H1" || name == "h1") return Metric::H1;
    throw ValidationError("unknown metric '" + name + "' (expected L2 or H1)");
}

std::string to_string(Metric m) { return m == Metric::L2 ? "L2" : "H1"; }

double form_potential(const QuadFormKind& kind, double x) {
    if (kind.form == FormKind::B) return 1.25 + bare_potential(x);
    // cosh^2(z)(1 + tanh z) = (e^{2z} + 1)/2 keeps the large-|x| tails finite.
    const double z = 0.5 * (x - kind.R);
    const double c = std::cosh(z);
    const double weight = 0.5 * (std::exp(x - kind.R) + 1.0) + kind.epsilon * c * c;
    return 1.25 - 2.0 * sech2(x) - 8.0 * sech2(x) * std::tanh(x) * weight;
}

double rank_one_profile(const QuadFormKind& kind, double x) {
    if (kind.form != FormKind::B_hat) return profiles::u_star(x);
    const double z = 0.5 * (x - kind.R);
    // eta_x^{-1/2} = sqrt(2) cosh z; cosh z (1 + tanh z) = e^z.
    const double eta_part = std::exp(z) + kind.epsilon * std::cosh(z);
    return std::exp(0.5 * kind.R) * std::sqrt(2.0) * eta_part * sech2(x);
}

double eval_form(const QuadFormKind& kind, const Field& f) {
    validate(kind);
    const Grid& g = f.grid();
    Field fx = spectral_derivative(f, 1);
    double acc = 0.0;
    for (int j = 0; j < g.N; ++j) acc += fx[j] * fx[j] + form_potential(kind, g.x(j)) * f[j] * f[j];
    double value = acc * g.h;
    if (kind.form == FormKind::B_hat) {
        double p = inner_product(Field::sample(g, [&](double x) { return rank_one_profile(kind, x); }), f);
        value += 2.0 * p * p;
    }
    return value;
}

namespace {

struct Solved {
    double value = 0.0;
    int iterations = 0;
};

Solved min_generalized_eigenvalue(const QuadFormKind& kind, Metric metric, bool rank_one, double L, int N) {
    Grid g = make_grid(L, N);
    std::vector<double> V(N), v(N), k2(g.modes());
    for (int j = 0; j < N; ++j) {
        V[j] = form_potential(kind, g.x(j));
        v[j] = rank_one_profile(kind, g.x(j));
    }
    for (int m = 0; m < g.modes(); ++m) k2[m] = g.k(m) * g.k(m);
    const double vmin = *std::min_element(V.begin(), V.end());
    double vmean = 0.0;
    for (double q : V) vmean += q / N;

    // A - sigma B must be positive: for the H1 metric B = 1 - d^2 also
    // contributes -sigma k^2.
    const double sigma = (metric == Metric::L2 ? vmin : std::min(1.0, vmin)) - 0.5;
    const double kcoef = metric == Metric::L2 ? 1.0 : 1.0 - sigma;
    std::vector<double> shifted_symbol(g.modes()), pre(g.modes()), metric_symbol(g.modes());
    const double c = std::max(vmean - sigma, 0.5);
    for (int m = 0; m < g.modes(); ++m) {
        shifted_symbol[m] = kcoef * k2[m];
        pre[m] = 1.0 / (kcoef * k2[m] + c);
        metric_symbol[m] = 1.0 + k2[m];
    }
    const double h = g.h;

    eig::ShiftInvertProblem p;
    p.n = N;
    p.sigma = sigma;
    p.shifted = [&](const std::vector<double>& x, std::vector<double>& y) {
        fft::apply_multiplier(N, shifted_symbol.data(), x.data(), y.data());
        for (int j = 0; j < N; ++j) y[j] += (V[j] - sigma) * x[j];
        if (rank_one) {
            double s = 0.0;
            for (int j = 0; j < N; ++j) s += v[j] * x[j];
            s *= 2.0 * h;
            for (int j = 0; j < N; ++j) y[j] += s * v[j];
        }
    };
    p.precond = [&](const std::vector<double>& x, std::vector<double>& y) {
        fft::apply_multiplier(N, pre.data(), x.data(), y.data());
    };
    if (metric == Metric::H1) {
        p.metric = [&](const std::vector<double>& x, std::vector<double>& y) {
            fft::apply_multiplier(N, metric_symbol.data(), x.data(), y.data());
        };
    }
    eig::Eigenpairs ep = eig::lowest_eigenpairs(p, 1, 1e-12, 500);
    return Solved{ep.values.at(0), ep.lanczos_iterations};
}

}  // namespace

CoercivityReport coercivity(const QuadFormKind& kind, Metric metric, bool rank_one,
                            const CoercivityOptions& options) {
    validate(kind);
    if (!(options.L > 0.0) || options.N < 16 || options.N % 2 != 0)
        throw ValidationError("coercivity grid needs L > 0 and an even N >= 16");
    CoercivityReport rep;
    rep.kind = kind;
    rep.metric = metric;
    rep.rank_one = rank_one;
    rep.L = options.L;
    rep.N = options.N;
    Solved s = min_generalized_eigenvalue(kind, metric, rank_one, options.L, options.N);
    rep.min_eigenvalue = s.value;
    rep.lanczos_iterations = s.iterations;
    if (options.refine) {
        Solved fine = min_generalized_eigenvalue(kind, metric, rank_one, options.L, 2 * options.N);
        rep.refined_eigenvalue = fine.value;
        rep.refinement_change = std::abs(fine.value - s.value);
    }
    if (rank_one) {
        if (kind.form == FormKind::B) rep.claimed_bound = metric == Metric::L2 ? 1.0 / 3.0 : 1.0 / 10.0;
        if (kind.form == FormKind::B_hat && metric == Metric::H1) rep.claimed_bound = 1.0 / 20.0;
    }
    return rep;
}

double overlap_bound_h(double s) {
    const double g = std::cbrt(std::pow(kLiebThirring - std::pow(std::abs(s), 1.5), 2.0));
    return (-1.25 + g) / (s + g);
}

HMinimum h_minimum_sampled(int samples) {
    if (samples < 2) throw ValidationError("need at least two samples");
    const double lo = -std::pow(kLiebThirring, 2.0 / 3.0), hi = -1.25;
    HMinimum best{lo, overlap_bound_h(lo)};
    for (int i = 1; i < samples; ++i) {
        double s = lo + (hi - lo) * i / (samples - 1);
        double v = overlap_bound_h(s);
        if (v < best.h) best = HMinimum{s, v};
    }
    return best;
}

HMinimum h_minimum_closed_form() {
    const double r = std::sqrt(1435533.0);
    return HMinimum{-(721489.0 + 567.0 * r) / 960000.0, (1701.0 + r) / 3402.0};
}

LiebThirringReport lieb_thirring_report(double L, int N) {
    LiebThirringReport rep;
    rep.L = L;
    rep.N = N;
    // V = -2 sech^2 (1 + 2 tanh) changes sign where tanh x = -1/2.
    auto [a, b] = boost::math::tools::bisect([](double x) { return bare_potential(x); }, -2.0, 0.0,
                                             [](double lo, double hi) { return hi - lo < 1e-13; });
    rep.support_left = 0.5 * (a + b);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto integrand = [](double x) {
        double v = bare_potential(x);
        return v < 0.0 ? v * v : 0.0;
    };
    rep.integral = 3.0 / 16.0 * integrator.integrate(integrand, rep.support_left, INFINITY);
    rep.bound_exponent_value = std::cbrt(rep.integral * rep.integral);

    Grid g = make_grid(L, N);
    Field q = Field::sample(g, bare_potential);
    auto gs = ground_state(q, 1e-10);
    auto* bound = std::get_if<GroundState>(&gs);
    if (!bound) throw SolverError("the quadratic-form potential has no bound state on this grid");
    rep.e0 = bound->energy;

    Field u = Field::sample(g, [](double x) { return std::sqrt(2.0 / M_PI) * profiles::u_star(x); });
    Field ux = spectral_derivative(u, 1);
    rep.rayleigh = inner_product(ux, ux) + inner_product(pointwise(q, u), u);
    double ov = inner_product(u, bound->psi);
    rep.overlap_sq = ov * ov;
    rep.overlap_lower_bound = overlap_bound_h(rep.e0);
    rep.h_min_sampled = h_minimum_sampled();
    rep.h_min_closed = h_minimum_closed_form();
    return rep;
}

}  // namespace miuralab
