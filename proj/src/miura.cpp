#include "miuralab/miura.hpp"

#include <cmath>

#include "fft.hpp"
#include "miuralab/errors.hpp"
#include "miuralab/profiles.hpp"

namespace miuralab {

using profiles::sech2;

KinkField::KinkField(double lambda_, double center_, Field remainder_)
    : lambda(lambda_), center(center_), remainder(std::move(remainder_)) {
    if (!(lambda > 0.0)) throw ValidationError("kink lambda must be positive");
}

KinkField KinkField::pure(const Grid& grid, double lambda, double center) {
    return KinkField(lambda, center, Field::zeros(grid));
}

double kink_derivative(double lambda, double x, int order) {
    double T = std::tanh(lambda * x);
    double S = sech2(lambda * x);
    double l2 = lambda * lambda;
    switch (order) {
        case 0: return lambda * T;
        case 1: return l2 * S;
        case 2: return -2.0 * l2 * lambda * S * T;
        case 3: return -2.0 * l2 * l2 * (S * S - 2.0 * S * T * T);
        case 4: return l2 * l2 * lambda * (16.0 * S * S * T - 8.0 * S * T * T * T);
        default: throw ValidationError("kink derivative order must be in [0, 4]");
    }
}

Field KinkField::kink_part() const {
    return Field::sample(grid(), [this](double x) { return kink_derivative(lambda, x - center, 0); });
}

Field KinkField::samples() const { return kink_part() + remainder; }

Field KinkField::derivative(int order) const {
    Field an = Field::sample(grid(), [this, order](double x) {
        return kink_derivative(lambda, x - center, order);
    });
    return an + spectral_derivative(remainder, order);
}

namespace {

Field miura_from(const Field& u, const Field& ux, MiuraVariant variant) {
    double sign = variant == MiuraVariant::plus ? 1.0 : -1.0;
    std::vector<double> s(u.size());
    for (int j = 0; j < u.size(); ++j) s[j] = sign * ux[j] + u[j] * u[j];
    return Field(u.grid(), std::move(s));
}

}  // namespace

Field miura(const Field& u, MiuraVariant variant) {
    return miura_from(u, spectral_derivative(u, 1), variant);
}

Field miura(const KinkField& u, MiuraVariant variant) {
    return miura_from(u.samples(), u.derivative(1), variant);
}

Field galilean_shift(const Field& u, double h, double t) {
    Field out = translate(u, h * t);
    return out + Field::constant(u.grid(), -h / 6.0);
}

KinkField galilean_shift(const KinkField& u, double h, double t) {
    Field rem = translate(u.remainder, h * t) + Field::constant(u.grid(), -h / 6.0);
    return KinkField(u.lambda, u.center + h * t, std::move(rem));
}

Rescaled rescale(const Field& u, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("rescale lambda must be positive");
    Grid g = make_grid(lambda * u.grid().L, u.grid().N);
    Field out(g, u.samples());
    out *= 1.0 / (lambda * lambda);
    return {out, lambda * lambda * lambda};
}

Rescaled rescale(const Field& u, double lambda, const Grid& target) {
    if (!(lambda > 0.0)) throw ValidationError("rescale lambda must be positive");
    const Grid& src = u.grid();
    std::vector<double> s(target.N);
    for (int j = 0; j < target.N; ++j) {
        double xs = target.x(j) / lambda;
        if (xs < -src.L || xs > src.L)
            throw ValidationError("rescaled grid reaches outside the source box");
        s[j] = interpolate(u, xs) / (lambda * lambda);
    }
    return {Field(target, std::move(s)), lambda * lambda * lambda};
}

namespace {

// Samples on an M-point grid over the same box of the order-th derivative
// of the trigonometric interpolant of f.
std::vector<double> fine_derivative(const Field& f, int M, int order) {
    const Grid& g = f.grid();
    Spectrum G = resample_spectrum(to_spectrum(f), g.N, M);
    if (order > 0) {
        for (int m = 0; m <= M / 2; ++m) G[m] *= std::pow(cplx(0.0, g.k(m)), order);
        if (order % 2 == 1) G[M / 2] = 0.0;
    }
    std::vector<double> out(M);
    fft::c2r(M, G.data(), out.data());
    for (double& v : out) v /= M;
    return out;
}

// Both sides expanded with the product rule in terms of u, its first four
// x-derivatives, u_t and u_tx, so no product is differentiated spectrally.
double identity_residual(const std::vector<std::vector<double>>& d, const std::vector<double>& ut,
                         const std::vector<double>& utx) {
    const auto& u = d[0];
    const auto& u1 = d[1];
    const auto& u2 = d[2];
    const auto& u3 = d[3];
    const auto& u4 = d[4];
    double res = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        double v = u1[j] + u[j] * u[j];
        double vt = utx[j] + 2.0 * u[j] * ut[j];
        double vx = u2[j] + 2.0 * u[j] * u1[j];
        double vxxx = u4[j] + 6.0 * u1[j] * u2[j] + 2.0 * u[j] * u3[j];
        double m = ut[j] + u3[j] - 6.0 * u[j] * u[j] * u1[j];
        double mx = utx[j] + u4[j] - 12.0 * u[j] * u1[j] * u1[j] - 6.0 * u[j] * u[j] * u2[j];
        double lhs = vt + vxxx - 6.0 * v * vx;
        double rhs = mx + 2.0 * u[j] * m;
        res = std::max(res, std::abs(lhs - rhs));
    }
    return res;
}

}  // namespace

double miura_identity_residual(const Field& u, const Field& u_t) {
    require_same_grid(u, u_t);
    const Grid& g = u.grid();
    int M = 3 * g.N;
    std::vector<std::vector<double>> d;
    for (int order = 0; order <= 4; ++order) d.push_back(fine_derivative(u, M, order));
    return identity_residual(d, fine_derivative(u_t, M, 0), fine_derivative(u_t, M, 1));
}

double miura_identity_residual(const KinkField& u, const Field& u_t) {
    require_same_grid(u.remainder, u_t);
    const Grid& g = u.grid();
    int M = 3 * g.N;
    double hf = 2.0 * g.L / M;
    auto with_kink = [&](int order) {
        auto v = fine_derivative(u.remainder, M, order);
        for (int j = 0; j < M; ++j) v[j] += kink_derivative(u.lambda, -g.L + j * hf - u.center, order);
        return v;
    };
    std::vector<std::vector<double>> d;
    for (int order = 0; order <= 4; ++order) d.push_back(with_kink(order));
    return identity_residual(d, fine_derivative(u_t, M, 0), fine_derivative(u_t, M, 1));
}

Field kink_frame_to_kdv(const Field& w, double y, double t) {
    const Grid& g = w.grid();
    Field ws = translate(w, 6.0 * t);
    Field wxs = translate(spectral_derivative(w, 1), 6.0 * t);
    std::vector<double> s(g.N);
    for (int j = 0; j < g.N; ++j) {
        double x = g.x(j);
        s[j] = ws[j] * ws[j] + 2.0 * ws[j] * std::tanh(x - y - 6.0 * t) + wxs[j];
    }
    return Field(g, std::move(s));
}

}  // namespace miuralab
