#pragma once

#include <complex>
#include <vector>

namespace miuralab::fft {

using cplx = std::complex<double>;

// Unnormalized real transforms of length n. Spectra hold n/2+1 entries.
void r2c(int n, const double* in, cplx* out);
// in is not modified. No 1/n scaling.
void c2r(int n, const cplx* in, double* out);

// out = inverse(mult_m * forward(in)) / n, with one multiplier per r2c mode.
// in and out may alias.
void apply_multiplier(int n, const double* mult, const double* in, double* out);

}  // namespace miuralab::fft
