#pragma once

#include <functional>
#include <vector>

#include "miuralab/grid.hpp"

namespace miuralab::ode {

// Classical RK4 marching along the grid nodes with a fixed number of
// substeps per cell. Coefficients are read from samples refined by
// 2 * substeps, so every RK4 stage lands on a stored value.
class NodeSweep {
public:
    NodeSweep(const Grid& grid, int substeps);

    int factor() const { return 2 * substeps_; }
    const Grid& grid() const { return grid_; }
    // Fine index i sits at -L + i h / factor().
    double x(int fine) const;
    std::vector<double> refine(const Field& f) const;

    // y' = rhs(fine index, y). Marches from node `from` to node `to` in either
    // direction. `step_done` runs after every substep and may rewrite y;
    // returning false stops the sweep. `on_node` receives the value at each
    // node reached, including the start. Returns the last fine index reached.
    int run(int from, int to, double y0, const std::function<double(int, double)>& rhs,
            const std::function<bool(int, double&)>& step_done,
            const std::function<void(int, double)>& on_node) const;

private:
    Grid grid_;
    int substeps_;
};

}  // namespace miuralab::ode
