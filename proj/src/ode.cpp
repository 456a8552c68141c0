#include "ode.hpp"

#include "miuralab/errors.hpp"

namespace miuralab::ode {

NodeSweep::NodeSweep(const Grid& grid, int substeps) : grid_(grid), substeps_(substeps) {
    if (substeps < 1) throw ValidationError("ODE sweep needs at least one substep per cell");
}

double NodeSweep::x(int fine) const { return -grid_.L + fine * grid_.h / factor(); }

std::vector<double> NodeSweep::refine(const Field& f) const { return upsample(f, factor()); }

int NodeSweep::run(int from, int to, double y0, const std::function<double(int, double)>& rhs,
                   const std::function<bool(int, double&)>& step_done,
                   const std::function<void(int, double)>& on_node) const {
    const int dir = to >= from ? 1 : -1;
    const double H = dir * grid_.h / substeps_;
    double y = y0;
    int i = from * factor();
    if (on_node) on_node(from, y);
    for (int node = from; node != to; node += dir) {
        for (int s = 0; s < substeps_; ++s) {
            double k1 = rhs(i, y);
            double k2 = rhs(i + dir, y + 0.5 * H * k1);
            double k3 = rhs(i + dir, y + 0.5 * H * k2);
            double k4 = rhs(i + 2 * dir, y + H * k3);
            y += H / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            i += 2 * dir;
            if (step_done && !step_done(i, y)) return i;
        }
        if (on_node) on_node(node + dir, y);
    }
    return i;
}

}  // namespace miuralab::ode
