#include "miuralab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "miuralab/errors.hpp"

namespace miuralab {

double Grid::k(int m) const { return std::numbers::pi * m / L; }

std::vector<double> Grid::nodes() const {
    std::vector<double> x(N);
    for (int j = 0; j < N; ++j) x[j] = this->x(j);
    return x;
}

Grid make_grid(double L, int N) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw ValidationError("grid half-length must be positive, got " + std::to_string(L));
    if (N < 8 || N % 2 != 0)
        throw ValidationError("grid point count must be even and >= 8, got " + std::to_string(N));
    Grid g;
    g.L = L;
    g.N = N;
    g.h = 2.0 * L / N;
    return g;
}

Field::Field(const Grid& grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (static_cast<int>(samples_.size()) != grid_.N)
        throw ValidationError("field has " + std::to_string(samples_.size()) +
                              " samples, grid expects " + std::to_string(grid_.N));
    for (double v : samples_)
        if (!std::isfinite(v)) throw ValidationError("field contains a non-finite sample");
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(grid.N, 0.0)); }

Field Field::constant(const Grid& grid, double value) {
    return Field(grid, std::vector<double>(grid.N, value));
}

Field Field::sample(const Grid& grid, const std::function<double(double)>& f) {
    std::vector<double> s(grid.N);
    for (int j = 0; j < grid.N; ++j) s[j] = f(grid.x(j));
    return Field(grid, std::move(s));
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
}

void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw ValidationError("fields live on different grids");
}

Field& Field::operator+=(const Field& o) {
    require_same_grid(*this, o);
    for (int j = 0; j < grid_.N; ++j) samples_[j] += o.samples_[j];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same_grid(*this, o);
    for (int j = 0; j < grid_.N; ++j) samples_[j] -= o.samples_[j];
    return *this;
}

Field& Field::operator*=(double a) {
    for (double& v : samples_) v *= a;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }
Field operator-(Field a) { return a *= -1.0; }

Field pointwise(const Field& a, const Field& b) {
    require_same_grid(a, b);
    std::vector<double> s(a.size());
    for (int j = 0; j < a.size(); ++j) s[j] = a[j] * b[j];
    return Field(a.grid(), std::move(s));
}

Field pointwise(const Field& a, const std::function<double(double)>& f) {
    std::vector<double> s(a.size());
    for (int j = 0; j < a.size(); ++j) s[j] = a[j] * f(a.grid().x(j));
    return Field(a.grid(), std::move(s));
}

double window_cutoff(const WindowSpec& w, double x) {
    if (x <= w.position - w.width) return 0.0;
    if (x >= w.position) return 1.0;
    double tau = 2.0 * (x - w.position) / w.width + 1.0;
    return 0.5 * (1.0 + std::tanh(tau / (1.0 - tau * tau)));
}

Spectrum to_spectrum(const Field& f) {
    Spectrum F(f.grid().modes());
    fft::r2c(f.size(), f.samples().data(), F.data());
    return F;
}

Field from_spectrum(const Grid& grid, const Spectrum& F) {
    std::vector<double> s(grid.N);
    fft::c2r(grid.N, F.data(), s.data());
    for (double& v : s) v /= grid.N;
    return Field(grid, std::move(s));
}

Spectrum resample_spectrum(const Spectrum& F, int N, int M) {
    Spectrum G(M / 2 + 1, cplx(0.0, 0.0));
    double scale = static_cast<double>(M) / N;
    if (M >= N) {
        for (int m = 0; m < N / 2; ++m) G[m] = F[m] * scale;
        if (M > N)
            G[N / 2] = 0.5 * F[N / 2] * scale;
        else
            G[N / 2] = F[N / 2] * scale;
    } else {
        for (int m = 0; m < M / 2; ++m) G[m] = F[m] * scale;
    }
    return G;
}

std::vector<double> upsample(const Field& f, int factor) {
    int N = f.size();
    int M = N * factor;
    Spectrum G = resample_spectrum(to_spectrum(f), N, M);
    std::vector<double> out(M);
    fft::c2r(M, G.data(), out.data());
    for (double& v : out) v /= M;
    return out;
}

Field spectral_derivative(const Field& f, int order) {
    if (order < 1) throw ValidationError("derivative order must be >= 1");
    const Grid& g = f.grid();
    Spectrum F = to_spectrum(f);
    for (int m = 0; m < g.modes(); ++m) F[m] *= std::pow(cplx(0.0, g.k(m)), order);
    if (order % 2 == 1) F[g.N / 2] = 0.0;
    return from_spectrum(g, F);
}

namespace {

double weighted_energy(const Grid& g, const Spectrum& F, double s) {
    double sum = 0.0;
    for (int m = 0; m < g.modes(); ++m) {
        double w = (m == 0 || m == g.N / 2) ? 1.0 : 2.0;
        double k = g.k(m);
        sum += w * std::pow(1.0 + k * k, s) * std::norm(F[m]);
    }
    return sum * 2.0 * g.L / (static_cast<double>(g.N) * g.N);
}

}  // namespace

double sobolev_norm(const Field& f, double s, std::optional<WindowSpec> window) {
    if (!window) return std::sqrt(weighted_energy(f.grid(), to_spectrum(f), s));
    if (s < 0.0 || s != std::floor(s))
        throw ValidationError("windowed Sobolev norms need a nonnegative integer order");
    if (!(window->width > 0.0)) throw ValidationError("window width must be positive");
    const WindowSpec w = *window;
    Field cut = pointwise(f, [&w](double x) { return window_cutoff(w, x); });
    return std::sqrt(weighted_energy(f.grid(), to_spectrum(cut), s));
}

double inner_product(const Field& f, const Field& g) {
    require_same_grid(f, g);
    double sum = 0.0;
    for (int j = 0; j < f.size(); ++j) sum += f[j] * g[j];
    return sum * f.grid().h;
}

double integral(const Field& f) {
    double sum = 0.0;
    for (double v : f.samples()) sum += v;
    return sum * f.grid().h;
}

Field multiply_dealiased(const Field& f, const Field& g) {
    require_same_grid(f, g);
    const Grid& grid = f.grid();
    int N = grid.N;
    int M = (N % 4 == 0) ? 3 * N / 2 : 2 * N;
    Spectrum F = to_spectrum(f);
    Spectrum G = to_spectrum(g);
    F[N / 2] = 0.0;
    G[N / 2] = 0.0;
    Spectrum Fp = resample_spectrum(F, N, M);
    Spectrum Gp = resample_spectrum(G, N, M);
    std::vector<double> a(M), b(M);
    fft::c2r(M, Fp.data(), a.data());
    fft::c2r(M, Gp.data(), b.data());
    for (int j = 0; j < M; ++j) a[j] *= b[j] / (static_cast<double>(M) * M);
    Spectrum P(M / 2 + 1);
    fft::r2c(M, a.data(), P.data());
    return from_spectrum(grid, resample_spectrum(P, M, N));
}

Field translate(const Field& f, double a) {
    const Grid& g = f.grid();
    Spectrum F = to_spectrum(f);
    for (int m = 0; m < g.N / 2; ++m) F[m] *= std::polar(1.0, -g.k(m) * a);
    F[g.N / 2] *= std::cos(g.k(g.N / 2) * a);
    return from_spectrum(g, F);
}

namespace {

double evaluate_series(const Grid& g, const Spectrum& F, double x) {
    double t = x + g.L;
    double sum = F[0].real();
    for (int m = 1; m < g.N / 2; ++m) sum += 2.0 * (F[m] * std::polar(1.0, g.k(m) * t)).real();
    sum += F[g.N / 2].real() * std::cos(g.k(g.N / 2) * t);
    return sum / g.N;
}

// Spectrum of the periodic part of the antiderivative.
Spectrum periodic_antiderivative(const Grid& g, const Spectrum& F) {
    Spectrum P(g.modes(), cplx(0.0, 0.0));
    for (int m = 1; m < g.N / 2; ++m) P[m] = F[m] / cplx(0.0, g.k(m));
    return P;
}

}  // namespace

double interpolate(const Field& f, double x) { return evaluate_series(f.grid(), to_spectrum(f), x); }

Field antiderivative(const Field& f, double x_ref) {
    const Grid& g = f.grid();
    Spectrum F = to_spectrum(f);
    double mean = F[0].real() / g.N;
    Spectrum P = periodic_antiderivative(g, F);
    Field per = from_spectrum(g, P);
    double p0 = evaluate_series(g, P, x_ref);
    std::vector<double> s(g.N);
    for (int j = 0; j < g.N; ++j) s[j] = mean * (g.x(j) - x_ref) + per[j] - p0;
    return Field(g, std::move(s));
}

double antiderivative_at(const Field& f, double x_ref, double x) {
    const Grid& g = f.grid();
    Spectrum F = to_spectrum(f);
    double mean = F[0].real() / g.N;
    Spectrum P = periodic_antiderivative(g, F);
    return mean * (x - x_ref) + evaluate_series(g, P, x) - evaluate_series(g, P, x_ref);
}

}  // namespace miuralab
