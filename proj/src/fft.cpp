#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace miuralab::fft {

namespace {

struct Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<int, Plans>& plan_cache() {
    static std::map<int, Plans> cache;
    return cache;
}

// Planner calls are not thread safe in FFTW; execution with the new-array
// interface is.
const Plans& plans_for(int n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> rbuf(n);
    std::vector<cplx> cbuf(n / 2 + 1);
    auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
    Plans p;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.fwd = fftw_plan_dft_r2c_1d(n, rbuf.data(), c, flags);
    p.bwd = fftw_plan_dft_c2r_1d(n, c, rbuf.data(), flags | FFTW_DESTROY_INPUT);
    return cache.emplace(n, p).first->second;
}

}  // namespace

void r2c(int n, const double* in, cplx* out) {
    const Plans& p = plans_for(n);
    fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void c2r(int n, const cplx* in, double* out) {
    const Plans& p = plans_for(n);
    thread_local std::vector<cplx> scratch;
    scratch.assign(in, in + n / 2 + 1);
    fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

void apply_multiplier(int n, const double* mult, const double* in, double* out) {
    thread_local std::vector<cplx> spec;
    spec.resize(n / 2 + 1);
    r2c(n, in, spec.data());
    for (int m = 0; m <= n / 2; ++m) spec[m] *= mult[m] / n;
    c2r(n, spec.data(), out);
}

}  // namespace miuralab::fft
