#pragma once

#include <functional>
#include <vector>

namespace miuralab::eig {

using LinearMap = std::function<void(const std::vector<double>& x, std::vector<double>& y)>;

struct PcgStats {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// Preconditioned conjugate gradients for SPD A; x carries the initial guess.
PcgStats pcg(const LinearMap& A, const LinearMap& precond, const std::vector<double>& b,
             std::vector<double>& x, double tol, int max_iterations);

// A x = mu B x with B SPD and A - sigma B SPD. An empty metric means B = I.
struct ShiftInvertProblem {
    int n = 0;
    LinearMap shifted;
    LinearMap metric;
    LinearMap precond;  // approximate inverse of A - sigma B
    double sigma = 0.0;
};

struct Eigenpairs {
    std::vector<double> values;  // ascending
    std::vector<std::vector<double>> vectors;
    int lanczos_iterations = 0;
    int operator_applications = 0;
};

// Lowest nev eigenpairs by shift-invert Lanczos (ARPACK mode 3). Throws
// SolverError when the outer or inner iteration fails to converge.
Eigenpairs lowest_eigenpairs(const ShiftInvertProblem& p, int nev, double tol, int max_iterations);

}  // namespace miuralab::eig
