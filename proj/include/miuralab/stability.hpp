#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "miuralab/config.hpp"
#include "miuralab/evolution.hpp"
#include "miuralab/miura.hpp"

namespace miuralab {

struct ModulationPoint {
    double t = 0.0;
    double y = 0.0;                         // kink center, co-moving frame coordinates
    std::optional<double> ydot_plus2;       // central difference of the track
    double residual = 0.0;                  // |Y(y)| at acceptance
    int iterations = 0;
};

// Y(y) = <u - lambda tanh(lambda (x - y)), psi(lambda (x - y))>, psi = eta sech^2.
// Also returns dY/dy when derivative is non-null.
double modulation_functional(const KinkField& u, double y, const WeightConfig& w, double* derivative = nullptr);

// Newton solve of Y(y) = 0 from y_guess. Throws SolverError on divergence or a
// derivative below 1e-6.
ModulationPoint solve_modulation(const KinkField& u, double y_guess, const WeightConfig& w = {},
                                 double tol = 1e-10);

struct StabilityReport {
    std::string experiment;
    RunStatus status = RunStatus::completed;
    std::string message;
    double lambda = 1.0;
    double initial_l2 = 0.0;  // ||w(0)||_2

    // Series on the diagnostic time base.
    std::vector<double> times;
    std::vector<ModulationPoint> modulation;
    std::vector<double> l2;             // ||w_mod||_2, w_mod = u - Q(. - y)
    std::vector<double> weighted_mass;  // int eta(x - y) w_mod^2
    std::vector<double> virial_integrand, virial_accum;
    std::vector<double> kato_integrand, kato_accum;
    std::vector<double> ydot_instant;  // -Y_t / Y_y from the equation
    std::map<int, std::vector<double>> windowed_norm;       // by Sobolev index
    std::map<double, std::vector<double>> phi_weighted;     // by A

    double sup_ratio = 1.0;
    double virial_integral = 0.0;
    double kato_integral = 0.0;
    double max_mass_increase = 0.0;  // max over i < j of mass_j - mass_i
    double ydot_crosscheck = 0.0;    // max |finite difference - instantaneous|
    std::optional<double> ydot_constant;  // fitted C in the ydot bound
    std::map<int, double> hs_sup_ratio;   // sup ||w_mod||_{H^s} / ||w(0)||_{H^s}
    std::map<int, double> decay_factor;   // windowed norm at t_end over t = 0
    std::map<double, double> phi_ratio;   // phi-weighted mass at t_end over t = 0

    // Soliton pipeline.
    std::optional<double> c, c_tilde, lambda_tilde, scale;
    std::optional<double> perturbation_hm1;  // ||R_c - u0||_{H^-1}
    std::vector<double> deviation_hm1;       // ||u - R_c~(. - y)||_{H^-1}
    std::vector<double> y_kdv;
    std::vector<double> lambda_track;        // sqrt(-E0) of the KdV-side field
    std::optional<double> sup_deviation_hm1, lambda_drift;

    Trajectory trajectory;
};

// Kink perturbation run in the co-moving frame: modulation, weighted masses,
// virial and Kato integrals. Tracks windowed norms and phi-weighted masses
// when with_decay is set.
StabilityReport run_kink_stability(const ExperimentConfig& cfg, bool with_decay = false);
StabilityReport run_asymptotic_decay(const ExperimentConfig& cfg);
StabilityReport run_soliton_pipeline(const ExperimentConfig& cfg);

struct AprioriMember {
    double amplitude = 0.0;
    double norm_hm1 = 0.0;  // ||u0||_{H^-1}
    double sup_hm1 = 0.0;
    double ratio = 0.0;     // sup / (norm + norm^3), 0 for u0 = 0
    std::optional<double> invert_residual;
    bool admissible = true;
    RunStatus status = RunStatus::completed;
    std::string message;
};

struct AprioriReport {
    std::vector<AprioriMember> members;
    double max_ratio = 0.0;
    int threads = 1;
};

// Evolves every member under KdV. Members run on up to MIURA_LAB_THREADS
// threads (default: hardware concurrency).
AprioriReport apriori_check(const std::vector<Field>& family, const std::vector<double>& amplitudes,
                            const ExperimentConfig& cfg);

int worker_threads();

}  // namespace miuralab
