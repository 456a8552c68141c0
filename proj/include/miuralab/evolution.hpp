#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "miuralab/grid.hpp"

namespace miuralab {

enum class ModelKind { kdv, mkdv, kink_frame };

ModelKind parse_model(const std::string& name);
std::string to_string(ModelKind m);

struct StepConfig {
    double dt = 1e-4;
    double t_end = 1.0;
    int diagnostic_stride = 100;
    int snapshot_stride = 0;  // 0 disables snapshots
};

// Damping -strength * profile(d) * u, where d is the distance to the box edge
// and the profile falls from 1 to 0 over `width`.
struct SpongeSpec {
    bool enabled = false;
    double width = 20.0;
    double strength = 30.0;
};

struct EvolutionOptions {
    double kink_lambda = 1.0;  // kink_frame only
    SpongeSpec sponge;
    double edge_tolerance = 1e-8;
    int contour_points = 32;
};

struct DiagnosticRow {
    double t = 0.0;
    std::optional<double> P0, P1, P2, P3, l2, hm1, y, ydot_plus2, eta_mass, virial_accum, kato_accum;
};

struct Conserved {
    double P0 = 0.0;
    double P1 = 0.0;
    std::optional<double> P2, P3;
};

enum class RunStatus { completed, blowup, edge_contamination, hook_failure };
std::string to_string(RunStatus s);

struct Snapshot {
    int index;
    double t;
    Field field;
};

struct Trajectory {
    ModelKind model = ModelKind::kdv;
    std::vector<double> times;
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticRow> diagnostics;
    RunStatus status = RunStatus::completed;
    std::string message;
    std::optional<Field> final_state;
};

// Hooks read the state at diagnostic times and fill their columns. Throwing
// SolverError aborts the run with a partial trajectory.
using DiagnosticHook = std::function<void(double t, const Field& state, DiagnosticRow& row)>;

/** Exponential time differencing RK4 stepper for one model on one grid. */
class Stepper {
public:
    Stepper(ModelKind model, const Grid& grid, double dt, const EvolutionOptions& options = {});

    void step(Spectrum& v) const;
    // Full right-hand side u_t for a physical-space state.
    Field rhs(const Field& u) const;
    double dt() const { return dt_; }
    const Grid& grid() const { return grid_; }
    double sponge(double x) const;

private:
    Spectrum nonlinear(const Spectrum& v) const;

    ModelKind model_;
    Grid grid_;
    double dt_;
    EvolutionOptions opt_;
    int M_;
    std::vector<cplx> lin_, E_, E2_, Q_, f1_, f2_, f3_;
    std::vector<double> sech2_fine_, tanh_fine_, sponge_fine_;
    mutable std::vector<double> work_;
    mutable Spectrum pad_;
};

Trajectory evolve(ModelKind model, const Field& initial, const StepConfig& cfg,
                  const std::vector<DiagnosticHook>& hooks = {}, const EvolutionOptions& options = {});

// The field whose KdV conservation laws are tracked: u itself for kdv and
// mkdv, miura(Q_lambda + w) - lambda^2 for kink_frame.
Field kdv_side(const Field& u, ModelKind model, double lambda = 1.0);

// P0..P3 of a KdV-side field; mkdv reports P0 and P1 only.
Conserved conserved_quantities(const Field& u, ModelKind model);

// Integer coefficients (a, b) in P3 = int u_xx^2 + a u u_x^2 + b u^4.
inline constexpr int kP3CubicCoefficient = 10;
inline constexpr int kP3QuarticCoefficient = 5;

}  // namespace miuralab
