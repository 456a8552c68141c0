#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace miuralab {

using cplx = std::complex<double>;

/** Uniform periodic grid on [-L, L) standing in for the real line. */
struct Grid {
    double L = 0.0;
    int N = 0;
    double h = 0.0;

    double x(int j) const { return -L + j * h; }
    // Wavenumber of r2c index m in [0, N/2].
    double k(int m) const;
    std::vector<double> nodes() const;
    int modes() const { return N / 2 + 1; }

    bool operator==(const Grid& o) const { return L == o.L && N == o.N; }
};

Grid make_grid(double L, int N);

class Field {
public:
    Field(const Grid& grid, std::vector<double> samples);
    static Field zeros(const Grid& grid);
    static Field constant(const Grid& grid, double value);
    static Field sample(const Grid& grid, const std::function<double(double)>& f);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& samples() const { return samples_; }
    int size() const { return grid_.N; }
    double operator[](int j) const { return samples_[j]; }

    double max_abs() const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double a);

private:
    Grid grid_;
    std::vector<double> samples_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);
Field operator-(Field a);
// Plain pointwise product (no dealiasing).
Field pointwise(const Field& a, const Field& b);
Field pointwise(const Field& a, const std::function<double(double)>& f);

/** Cutoff for half-line norms: 0 left of position-width, 1 right of position. */
struct WindowSpec {
    double position = 0.0;
    double width = 2.0;
};

double window_cutoff(const WindowSpec& w, double x);

using Spectrum = std::vector<cplx>;

// FFTW convention: F_m = sum_j f_j exp(-2 pi i j m / N), unnormalized.
Spectrum to_spectrum(const Field& f);
Field from_spectrum(const Grid& grid, const Spectrum& F);

// Spectrum of length M/2+1 whose length-M inverse transform, scaled by 1/M,
// samples the trigonometric interpolant of F on M points. Truncation drops the
// new Nyquist mode; padding splits the old one.
Spectrum resample_spectrum(const Spectrum& F, int N, int M);
// Samples of the interpolant of f on a grid refined by an integer factor.
std::vector<double> upsample(const Field& f, int factor);

Field spectral_derivative(const Field& f, int order);
double sobolev_norm(const Field& f, double s, std::optional<WindowSpec> window = std::nullopt);
double inner_product(const Field& f, const Field& g);
double integral(const Field& f);
Field multiply_dealiased(const Field& f, const Field& g);

// f(x - a) by phase rotation.
Field translate(const Field& f, double a);
// Trigonometric interpolant evaluated at an arbitrary point.
double interpolate(const Field& f, double x);
// Samples of x -> int_{x_ref}^x f, with the mean contributing a linear term.
Field antiderivative(const Field& f, double x_ref);
// Integral from x_ref to an arbitrary point, consistent with antiderivative.
double antiderivative_at(const Field& f, double x_ref, double x);

void require_same_grid(const Field& a, const Field& b);

}  // namespace miuralab
