#pragma once

#include "miuralab/grid.hpp"

namespace miuralab {

enum class MiuraVariant { plus, star };

/** lambda tanh(lambda (x - center)) + remainder, with a periodic remainder. */
struct KinkField {
    double lambda = 1.0;
    double center = 0.0;
    Field remainder;

    KinkField(double lambda, double center, Field remainder);
    static KinkField pure(const Grid& grid, double lambda, double center = 0.0);

    const Grid& grid() const { return remainder.grid(); }
    Field kink_part() const;
    Field samples() const;
    // Exact derivative of the tanh part plus spectral derivative of the remainder.
    Field derivative(int order) const;
};

// Analytic derivatives of lambda tanh(lambda x), orders 0..4.
double kink_derivative(double lambda, double x, int order);

Field miura(const Field& u, MiuraVariant variant);
Field miura(const KinkField& u, MiuraVariant variant);

struct SymmetryParams {
    double h = 0.0;
    double lambda_scale = 1.0;
};

// u(t, x - h t) - h/6
Field galilean_shift(const Field& u, double h, double t);
KinkField galilean_shift(const KinkField& u, double h, double t);

struct Rescaled {
    Field field;
    double time_dilation;  // t -> t / lambda^3
};

// lambda^{-2} u(x / lambda) on the grid with half-length lambda L (same N).
Rescaled rescale(const Field& u, double lambda);
// Same map resampled onto a given grid; every target node must map into the source box.
Rescaled rescale(const Field& u, double lambda, const Grid& target);

double miura_identity_residual(const Field& u, const Field& u_t);
double miura_identity_residual(const KinkField& u, const Field& u_t);

// w(x-6t)^2 + 2 w(x-6t) tanh(x-y-6t) + w_x(x-6t)
Field kink_frame_to_kdv(const Field& w, double y, double t);

}  // namespace miuralab
