#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "miuralab/errors.hpp"
#include "miuralab/grid.hpp"

namespace miuralab {

/** Lowest eigenpair of -d^2/dx^2 + q on the grid. */
struct GroundState {
    double energy = 0.0;
    Field psi;  // unit L2 norm, strictly positive
    int lanczos_iterations = 0;
};

struct NoBoundState {
    double lowest_energy = 0.0;
};

std::variant<GroundState, NoBoundState> ground_state(const Field& q, double tol = 1e-10);

// ||(-d^2 + q - E) psi||_2 with a spectral second derivative.
double eigen_residual(const Field& q, const GroundState& gs);

struct RiccatiSolution {
    Field r;
    double lambda = 1.0;
    double center = 0.0;   // zero crossing of r
    double tail_l2 = 0.0;  // ||r - lambda tanh(lambda (x - center))||_2
};

struct SpectrumBelowThreshold {
    double lambda = 1.0;
    std::optional<double> blowup_location;  // absent when -lambda^2 is itself an eigenvalue
};

// Solution of r' = q + lambda^2 - r^2 running from -lambda to +lambda, fixed
// so that q = 0 gives lambda tanh(lambda x).
std::variant<RiccatiSolution, SpectrumBelowThreshold> riccati_shoot(const Field& q, double lambda);

enum class Branch { f_lambda, f_star };
Branch parse_branch(const std::string& name);
std::string to_string(Branch b);

struct ForwardImage {
    Field u;
    std::optional<double> rho;  // f_lambda only
};

ForwardImage forward(Branch branch, const Field& r_tilde, double lambda);

struct InversionResult {
    Field r_tilde;
    double lambda = 1.0;
    std::optional<double> rho;
    Branch branch = Branch::f_lambda;
    double residual = 0.0;                 // H^{-1} distance of forward(...) to the target
    std::vector<double> residual_history;  // Newton iterates, empty if none ran
};

class SpectrumBelowThresholdError : public SolverError {
public:
    explicit SpectrumBelowThresholdError(const SpectrumBelowThreshold& info);
    SpectrumBelowThreshold info;
};

class NoBoundStateError : public SolverError {
public:
    explicit NoBoundStateError(const NoBoundState& info);
    NoBoundState info;
};

// lambda is required for f_lambda and must be absent for f_star.
InversionResult invert(const Field& target, Branch branch, std::optional<double> lambda, double tol);

// Smooth bump: 1 on [-1, 1], exp(1 - 1/(1 - (|x| - 1)^2)) out to |x| = 2, 0 beyond.
double kernel_bump(double x);

// Kernel of the right inverse of v -> v_x + 2 (lambda tanh(lambda x) + r) v.
// Without r it is the bare kernel; with r it carries exp(-2 int_0^x r + 2 int_0^y r).
double kernel_K(double x, double y, const std::optional<Field>& r = std::nullopt, double lambda = 1.0);

// T_r g, the kernel integral, computed as the solution of
// v' + 2 (lambda tanh(lambda x) + r) v = g fixed by its value at x = 0.
Field apply_T(const Field& r, const Field& g, double lambda = 1.0);

// sech^2(lambda x) exp(-2 int_0^x r), spanning the null space of the linearization.
Field null_direction(const Field& r, double lambda);

struct NewtonOptions {
    int max_iterations = 30;
};

// Newton iteration for F_lambda(r) = (target, rho_target), residual measured as
// ||first component||_{H^{-1}} + |rho - rho_target|.
InversionResult newton_refine(const Field& target, double lambda, double rho_target, const Field& r_init,
                              double tol, const NewtonOptions& options = {});

// Replaces a Riccati solution whose exponential phi = exp(int r) decays on the
// right by the log-derivative of phi (C + int_0^x phi^{-2}), C = 10 / min_{x<=0} phi^2.
Field grow_both_sides(const Field& r);

}  // namespace miuralab
