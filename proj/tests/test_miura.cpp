#include <doctest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "miuralab/errors.hpp"
#include "miuralab/miura.hpp"
#include "miuralab/profiles.hpp"

using namespace miuralab;
using profiles::sech2;

namespace {
double max_diff(const Field& a, const Field& b) { return (a - b).max_abs(); }
}  // namespace

TEST_CASE("miura maps of the kink") {
    Grid g = make_grid(50, 2048);
    KinkField k = KinkField::pure(g, 1.0);
    CHECK(max_diff(miura(k, MiuraVariant::plus), Field::constant(g, 1.0)) < 1e-13);
    Field star = Field::sample(g, [](double x) { return 1.0 - 2.0 * sech2(x); });
    CHECK(max_diff(miura(k, MiuraVariant::star), star) < 1e-13);
    KinkField k2 = KinkField::pure(g, 1.7);
    Field star2 = Field::sample(g, [](double x) { return 1.7 * 1.7 * (1.0 - 2.0 * sech2(1.7 * x)); });
    CHECK(max_diff(miura(k2, MiuraVariant::star), star2) < 1e-12);
    CHECK(miura(Field::zeros(g), MiuraVariant::plus).max_abs() == 0.0);
}

TEST_CASE("reflection and mean near one") {
    Grid g = make_grid(10, 128);
    std::mt19937_64 rng(11);
    Field u = testutil::random_localized(g, rng, 0.3);
    Field a = miura(-u, MiuraVariant::plus);
    Field b = miura(u, MiuraVariant::star);
    for (int j = 0; j < g.N; ++j) CHECK(a[j] == b[j]);

    Grid big = make_grid(50, 2048);
    double prev = 1e9;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        Field w = Field::sample(big, [eps](double x) { return eps * std::exp(-x * x); });
        Field m = miura(KinkField(1.0, 0.0, w), MiuraVariant::plus);
        double mean = integral(m) / (2.0 * big.L);
        CHECK(std::abs(mean - 1.0) < prev);
        prev = std::abs(mean - 1.0);
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("galilean_shift") {
    Grid g = make_grid(20, 256);
    CHECK(max_diff(galilean_shift(Field::zeros(g), 6.0, 0.37), Field::constant(g, -1.0)) < 1e-15);
    Field u = Field::sample(g, [](double x) { return std::exp(-x * x); });
    CHECK(max_diff(galilean_shift(u, -6.0, 0.0), u + Field::constant(g, 1.0)) < 1e-14);
    CHECK(max_diff(galilean_shift(u, 0.0, 3.0), u) < 1e-15);
    Field back = galilean_shift(galilean_shift(u, 2.5, 0.8), -2.5, 0.8);
    CHECK(max_diff(back, u) < 1e-12);
    KinkField k = galilean_shift(KinkField::pure(g, 1.0), 6.0, 0.5);
    CHECK(k.center == doctest::Approx(3.0));
    CHECK(k.remainder[5] == doctest::Approx(-1.0));
}

TEST_CASE("rescale") {
    Grid g = make_grid(50, 2048);
    Field r4 = Field::sample(g, [](double x) { return profiles::soliton(4.0, x); });
    Rescaled r = rescale(r4, 2.0);
    CHECK(r.field.grid().L == doctest::Approx(100.0));
    CHECK(r.time_dilation == doctest::Approx(8.0));
    Field r1 = Field::sample(r.field.grid(), [](double x) { return profiles::soliton(1.0, x); });
    CHECK(max_diff(r.field, r1) < 1e-10);
    CHECK(max_diff(rescale(r4, 1.0).field, r4) == 0.0);
    Field c = rescale(Field::constant(g, 3.0), 1.5).field;
    CHECK(c[7] == doctest::Approx(3.0 / 2.25));

    Field twice = rescale(rescale(r4, 1.3).field, 0.7).field;
    Field once = rescale(r4, 0.91).field;
    CHECK(twice.grid().L == doctest::Approx(once.grid().L));
    CHECK(max_diff(Field(once.grid(), twice.samples()), once) < 1e-12);

    Grid target = make_grid(40, 2048);
    Field res = rescale(r4, 2.0, target).field;
    Field r1t = Field::sample(target, [](double x) { return profiles::soliton(1.0, x); });
    CHECK(max_diff(res, r1t) < 1e-10);
    CHECK_THROWS_AS(rescale(r4, 0.5, target), ValidationError);
}

TEST_CASE("Miura identity residual") {
    Grid g = make_grid(50, 2048);
    KinkField k = KinkField::pure(g, 1.0);
    Field ut = Field::sample(g, [](double x) { return 2.0 * sech2(x); });
    CHECK(miura_identity_residual(k, ut) < 1e-10);

    Grid small = make_grid(M_PI, 64);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Field u = testutil::random_bandlimited(small, small.N / 3, rng, 2.0, 0.5);
        Field v = testutil::random_bandlimited(small, small.N / 3, rng, 2.0, 0.5);
        CHECK(miura_identity_residual(u, v) < 1e-8);
    }
    CHECK(miura_identity_residual(Field::zeros(small), Field::zeros(small)) == 0.0);
}

TEST_CASE("kink_frame_to_kdv") {
    Grid g = make_grid(50, 2048);
    CHECK(kink_frame_to_kdv(Field::zeros(g), 0.3, 0.7).max_abs() < 1e-15);
    Field w = Field::sample(g, [](double x) { return 0.1 * std::exp(-(x - 1) * (x - 1)); });
    Field v = kink_frame_to_kdv(w, 0.0, 0.0);
    Field ref = miura(KinkField(1.0, 0.0, w), MiuraVariant::plus) - Field::constant(g, 1.0);
    CHECK(max_diff(v, ref) < 1e-10);

    // ||w_x||_{H^-1} + ||2 tanh w||_{H^-1} + ||w^2||_{H^-1} <= (3 + ||w||_inf) ||w||_2
    for (double a : {1e-3, 1e-2, 1e-1, 0.5}) {
        Field wa = Field::sample(g, [a](double x) { return a * std::exp(-x * x); });
        Field va = kink_frame_to_kdv(wa, 0.0, 1.5);
        CHECK(sobolev_norm(va, -1.0) <= (3.0 + wa.max_abs()) * sobolev_norm(wa, 0.0));
    }
}
