#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "common.hpp"
#include "miuralab/errors.hpp"
#include "miuralab/evolution.hpp"
#include "miuralab/miura.hpp"
#include "miuralab/profiles.hpp"

using namespace miuralab;
using profiles::sech2;

namespace {

double max_diff(const Field& a, const Field& b) { return (a - b).max_abs(); }

Field soliton_field(const Grid& g, double c, double x0 = 0.0) {
    return Field::sample(g, [c, x0](double x) { return profiles::soliton(c, x - x0); });
}

// Runs whose radiation is allowed to wrap around the periodic box.
EvolutionOptions no_edge_check() {
    EvolutionOptions o;
    o.edge_tolerance = INFINITY;
    return o;
}

double soliton_error(const Grid& g, double dt, double t_end) {
    StepConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.diagnostic_stride = 1000000;
    Trajectory tr = evolve(ModelKind::kdv, soliton_field(g, 4.0), cfg, {}, no_edge_check());
    REQUIRE(tr.status == RunStatus::completed);
    return max_diff(*tr.final_state, soliton_field(g, 4.0, 4.0 * t_end));
}

}  // namespace

TEST_CASE("KdV soliton transport") {
    Grid g = make_grid(50, 2048);
    auto t0 = std::chrono::steady_clock::now();
    double err = soliton_error(g, 1e-4, 1.0);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("soliton error " << err << " in " << secs << " s");
    CHECK(err < 1e-6);
}

TEST_CASE("temporal order at coarse steps") {
    Grid g = make_grid(30, 512);
    double e1 = soliton_error(g, 4e-3, 0.5);
    double e2 = soliton_error(g, 2e-3, 0.5);
    double e3 = soliton_error(g, 1e-3, 0.5);
    double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
    MESSAGE("errors " << e1 << " " << e2 << " " << e3 << " orders " << p1 << " " << p2);
    CHECK(p1 > 3.5);
    CHECK(p2 > 3.5);
}

TEST_CASE("conserved quantities of R_4") {
    Grid g = make_grid(50, 2048);
    Conserved c = conserved_quantities(soliton_field(g, 4.0), ModelKind::kdv);
    CHECK(std::abs(c.P1 - 16.0 / 3.0) < 1e-8);
    CHECK(std::abs(c.P0 + 4.0) < 1e-8);
    Conserved m = conserved_quantities(soliton_field(g, 4.0), ModelKind::mkdv);
    CHECK(!m.P2.has_value());
    CHECK(!m.P3.has_value());
}

TEST_CASE("conservation drift over soliton runs") {
    Grid g = make_grid(50, 2048);
    StepConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    cfg.diagnostic_stride = 1000;
    Trajectory tr = evolve(ModelKind::kdv, soliton_field(g, 4.0), cfg);
    REQUIRE(tr.status == RunStatus::completed);
    double p2 = *tr.diagnostics.front().P2;
    for (const auto& row : tr.diagnostics) CHECK(std::abs(*row.P2 - p2) / (1.0 + std::abs(p2)) < 1e-8);

    cfg.dt = 2e-4;
    cfg.t_end = 5.0;
    cfg.diagnostic_stride = 2500;
    tr = evolve(ModelKind::kdv, soliton_field(g, 4.0, -8.0), cfg);
    REQUIRE(tr.status == RunStatus::completed);
    const auto& first = tr.diagnostics.front();
    for (const auto& row : tr.diagnostics) {
        CHECK(std::abs(*row.P0 - *first.P0) / (1.0 + std::abs(*first.P0)) < 1e-7);
        CHECK(std::abs(*row.P1 - *first.P1) / (1.0 + std::abs(*first.P1)) < 1e-7);
        CHECK(std::abs(*row.P2 - *first.P2) / (1.0 + std::abs(*first.P2)) < 1e-7);
    }
}

// Fit P3 = int u_xx^2 + a u u_x^2 + b u^4 by requiring zero drift on three
// random runs, then compare with the frozen integers.
TEST_CASE("P3 coefficients from the drift oracle") {
    Grid g = make_grid(30, 512);
    std::mt19937_64 rng(2024);
    StepConfig cfg;
    cfg.dt = 2e-4;
    cfg.t_end = 1.0;
    cfg.diagnostic_stride = 5000;
    double A[3][2], rhs[3];
    auto monomials = [](const Field& u, double out[3]) {
        Field ux = spectral_derivative(u, 1), uxx = spectral_derivative(u, 2);
        out[0] = out[1] = out[2] = 0.0;
        for (int j = 0; j < u.size(); ++j) {
            out[0] += uxx[j] * uxx[j];
            out[1] += u[j] * ux[j] * ux[j];
            out[2] += u[j] * u[j] * u[j] * u[j];
        }
        for (int i = 0; i < 3; ++i) out[i] *= u.grid().h;
    };
    std::vector<Field> finals, initials;
    for (int run = 0; run < 3; ++run) {
        Field u0 = testutil::random_localized(g, rng, 1.0, 1.5, 0.5);
        Trajectory tr = evolve(ModelKind::kdv, u0, cfg, {}, no_edge_check());
        REQUIRE(tr.status == RunStatus::completed);
        double a0[3], a1[3];
        monomials(u0, a0);
        monomials(*tr.final_state, a1);
        A[run][0] = a1[1] - a0[1];
        A[run][1] = a1[2] - a0[2];
        rhs[run] = -(a1[0] - a0[0]);
        initials.push_back(u0);
        finals.push_back(*tr.final_state);
    }
    // Normal equations for the 3x2 least-squares problem.
    double n00 = 0, n01 = 0, n11 = 0, r0 = 0, r1 = 0;
    for (int i = 0; i < 3; ++i) {
        n00 += A[i][0] * A[i][0];
        n01 += A[i][0] * A[i][1];
        n11 += A[i][1] * A[i][1];
        r0 += A[i][0] * rhs[i];
        r1 += A[i][1] * rhs[i];
    }
    double det = n00 * n11 - n01 * n01;
    double a = (r0 * n11 - r1 * n01) / det;
    double b = (n00 * r1 - n01 * r0) / det;
    MESSAGE("fitted P3 coefficients " << a << " " << b);
    CHECK(std::lround(a) == kP3CubicCoefficient);
    CHECK(std::lround(b) == kP3QuarticCoefficient);
    CHECK(std::abs(a - kP3CubicCoefficient) < 1e-4);
    CHECK(std::abs(b - kP3QuarticCoefficient) < 1e-4);
    for (int run = 0; run < 3; ++run) {
        double p0 = *conserved_quantities(initials[run], ModelKind::kdv).P3;
        double p1 = *conserved_quantities(finals[run], ModelKind::kdv).P3;
        CHECK(std::abs(p1 - p0) / (1.0 + std::abs(p0)) < 1e-9);
    }
}

TEST_CASE("kink frame: exact kink and linearization") {
    Grid g = make_grid(50, 2048);
    StepConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.diagnostic_stride = 250;
    Trajectory tr = evolve(ModelKind::kink_frame, Field::zeros(g), cfg);
    REQUIRE(tr.status == RunStatus::completed);
    CHECK(tr.final_state->max_abs() == 0.0);

    Stepper st(ModelKind::kink_frame, g, 1e-3);
    const double eps = 1e-7;
    Field w = Field::sample(g, [](double x) { return std::exp(-(x - 1) * (x - 1)) * std::sin(2 * x); });
    Field gen = st.rhs(eps * w);
    gen *= 1.0 / eps;
    // w_t = 4 w_x - w_xxx - 6 (sech^2 w)_x
    Field ref = 4.0 * spectral_derivative(w, 1) - spectral_derivative(w, 3) -
                6.0 * spectral_derivative(pointwise(w, [](double x) { return sech2(x); }), 1);
    CHECK(max_diff(gen, ref) < 1e-5);
}

TEST_CASE("kink frame preserves the KdV laws of its Miura image") {
    Grid g = make_grid(50, 2048);
    StepConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.diagnostic_stride = 100;
    // Narrow spectrum: fast dispersive tails would wrap onto the tanh seam.
    Field w0 = Field::sample(g, [](double x) { return 0.1 * std::exp(-(x - 3) * (x - 3) / 4); });
    Trajectory tr = evolve(ModelKind::kink_frame, w0, cfg, {}, no_edge_check());
    REQUIRE(tr.status == RunStatus::completed);
    const auto& first = tr.diagnostics.front();
    for (const auto& row : tr.diagnostics) {
        CHECK(std::abs(*row.P1 - *first.P1) < 1e-8);
        CHECK(std::abs(*row.P2 - *first.P2) < 1e-8);
    }
}

TEST_CASE("mKdV odd symmetry") {
    Grid g = make_grid(30, 512);
    Field u0 = Field::sample(g, [](double x) { return 0.8 * std::exp(-x * x) * (1 + 0.3 * x); });
    StepConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.diagnostic_stride = 100;
    Trajectory a = evolve(ModelKind::mkdv, u0, cfg);
    Trajectory b = evolve(ModelKind::mkdv, -u0, cfg);
    CHECK(max_diff(*a.final_state, -*b.final_state) < 1e-14);
    CHECK(!a.diagnostics.front().P2.has_value());
}

TEST_CASE("Galilean commutation") {
    Grid g = make_grid(50, 2048);
    const double dt = 1e-3, T = 0.5, h = 0.6;
    double soliton_err = soliton_error(g, dt, T);
    StepConfig cfg;
    cfg.dt = dt;
    cfg.t_end = T;
    cfg.diagnostic_stride = 100000;
    Field u0 = soliton_field(g, 4.0);
    Trajectory shifted = evolve(ModelKind::kdv, galilean_shift(u0, h, 0.0), cfg, {}, no_edge_check());
    Trajectory plain = evolve(ModelKind::kdv, u0, cfg, {}, no_edge_check());
    Field expect = galilean_shift(*plain.final_state, h, T);
    double d = max_diff(*shifted.final_state, expect);
    MESSAGE("galilean mismatch " << d << " vs soliton error " << soliton_err);
    CHECK(d < 10.0 * soliton_err);
}

TEST_CASE("detectors") {
    Grid g = make_grid(20, 256);
    StepConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.diagnostic_stride = 10;
    Trajectory edge = evolve(ModelKind::kdv, soliton_field(g, 4.0, 17.0), cfg);
    CHECK(edge.status == RunStatus::edge_contamination);
    CHECK(!edge.message.empty());

    cfg.dt = 0.05;
    Field big = Field::sample(g, [](double x) { return -200.0 * std::exp(-x * x); });
    Trajectory blow = evolve(ModelKind::kdv, big, cfg);
    CHECK(blow.status == RunStatus::blowup);

    cfg.dt = -1.0;
    CHECK_THROWS_AS(evolve(ModelKind::kdv, big, cfg), ValidationError);
}

TEST_CASE("snapshots and strides") {
    Grid g = make_grid(30, 256);
    StepConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.diagnostic_stride = 25;
    cfg.snapshot_stride = 50;
    Trajectory tr = evolve(ModelKind::kdv, soliton_field(g, 1.0), cfg);
    REQUIRE(tr.snapshots.size() == 3);
    CHECK(tr.snapshots[2].index == 2);
    CHECK(tr.times.size() == 5);
    for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
    CHECK(tr.times.back() == doctest::Approx(0.1));
}
