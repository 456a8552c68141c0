#include "eigensolver.hpp"

#include <arpack/arpack.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "miuralab/errors.hpp"

namespace miuralab::eig {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

PcgStats pcg(const LinearMap& A, const LinearMap& precond, const std::vector<double>& b,
             std::vector<double>& x, double tol, int max_iterations) {
    const std::size_t n = b.size();
    PcgStats st;
    double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        st.converged = true;
        return st;
    }
    std::vector<double> r(n), z(n), p(n), Ap(n);
    A(x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    precond(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 0; it < max_iterations; ++it) {
        double rnorm = std::sqrt(dot(r, r));
        st.iterations = it;
        st.relative_residual = rnorm / bnorm;
        if (st.relative_residual < tol) {
            st.converged = true;
            return st;
        }
        A(p, Ap);
        double alpha = rz / dot(p, Ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        precond(r, z);
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    st.iterations = max_iterations;
    st.relative_residual = std::sqrt(dot(r, r)) / bnorm;
    st.converged = st.relative_residual < tol;
    return st;
}

Eigenpairs lowest_eigenpairs(const ShiftInvertProblem& p, int nev, double tol, int max_iterations) {
    const a_int n = p.n;
    if (nev < 1 || nev >= n) throw ValidationError("eigenpair count out of range");
    const bool general = static_cast<bool>(p.metric);
    const arpack::bmat bm = general ? arpack::bmat::generalized : arpack::bmat::identity;
    const a_int ncv = std::min<a_int>(n, std::max<a_int>(2 * nev + 1, 24));
    const a_int lworkl = ncv * (ncv + 8);

    std::vector<double> resid(n), v(static_cast<std::size_t>(n) * ncv), workd(3 * n), workl(lworkl);
    // Smooth deterministic start vector; a random one would break reproducibility.
    for (a_int i = 0; i < n; ++i) resid[i] = 1.0 + 0.25 * std::sin(0.37 * i);
    a_int iparam[11] = {0};
    a_int ipntr[14] = {0};
    iparam[0] = 1;
    iparam[2] = max_iterations;
    iparam[6] = 3;
    a_int ido = 0, info = 1;

    std::vector<double> in(n), out(n), guess(n, 0.0);
    Eigenpairs result;
    const double inner_tol = std::max(1e-14, 0.01 * tol);
    auto solve = [&](const double* rhs, double* sol) {
        std::copy(rhs, rhs + n, in.begin());
        std::fill(guess.begin(), guess.end(), 0.0);
        PcgStats st = pcg(p.shifted, p.precond, in, guess, inner_tol, 20 * n);
        if (!st.converged)
            throw SolverError("inner conjugate-gradient solve stalled at relative residual " +
                              std::to_string(st.relative_residual));
        std::copy(guess.begin(), guess.end(), sol);
        ++result.operator_applications;
    };

    while (true) {
        arpack::saupd(ido, bm, n, arpack::which::largest_magnitude, nev, tol, resid.data(), ncv,
                      v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, info);
        double* x = workd.data() + ipntr[0] - 1;
        double* y = workd.data() + ipntr[1] - 1;
        if (ido == -1) {
            if (general) {
                std::copy(x, x + n, in.begin());
                p.metric(in, out);
                solve(out.data(), y);
            } else {
                solve(x, y);
            }
        } else if (ido == 1) {
            solve(general ? workd.data() + ipntr[2] - 1 : x, y);
        } else if (ido == 2) {
            std::copy(x, x + n, in.begin());
            p.metric(in, out);
            std::copy(out.begin(), out.end(), y);
        } else {
            break;
        }
    }
    if (info < 0) throw SolverError("ARPACK saupd failed with info " + std::to_string(info));
    if (info == 1) throw SolverError("Lanczos iteration cap reached before convergence");
    result.lanczos_iterations = iparam[2];

    std::vector<a_int> select(ncv, 0);
    std::vector<double> d(nev), z(static_cast<std::size_t>(n) * nev);
    a_int einfo = 0;
    arpack::seupd(1, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), n, p.sigma, bm,
                  n, arpack::which::largest_magnitude, nev, tol, resid.data(), ncv, v.data(), n, iparam,
                  ipntr, workd.data(), workl.data(), lworkl, einfo);
    if (einfo != 0) throw SolverError("ARPACK seupd failed with info " + std::to_string(einfo));

    const int found = iparam[4];
    std::vector<int> order(found);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
    for (int k : order) {
        result.values.push_back(d[k]);
        result.vectors.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(k) * n,
                                    z.begin() + static_cast<std::ptrdiff_t>(k + 1) * n);
    }
    return result;
}

}  // namespace miuralab::eig
