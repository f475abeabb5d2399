#pragma once

// Exhaustive grid minimisers for two-node allocation problems. They certify the
// optimisers in allocation.hpp: a coarse grid locates the basin, then repeated
// local grids around the incumbent shrink the cell until it is below `resolution`.

#include <functional>
#include <vector>

#include "cvsense/allocation.hpp"

namespace cvsense {

struct GridMinimum {
    std::vector<double> argmin;
    double value = 0.0;
    long evaluations = 0;
};

struct GridOptions {
    int points = 2000;         // per axis on the first pass
    int refine_points = 41;    // per axis on every refinement pass
    double resolution = 1e-13; // stop when the cell is this small relative to the box
    int max_rounds = 80;
};

/// Minimises f over [lo, hi]. Grid values are computed in parallel and the argmin is
/// taken serially (lowest index wins ties), so the result does not depend on threads.
GridMinimum grid_minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                             const GridOptions& opts = {});

/// Same on the box [lo0, hi0] x [lo1, hi1].
GridMinimum grid_minimize_2d(const std::function<double(double, double)>& f, double lo0, double hi0, double lo1,
                             double hi1, const GridOptions& opts = {});

/// Product-probe allocation N_1 in [0, N_S] for a two-node network; argmin = {N_1}.
GridMinimum grid_allocation_two_node(const WeightedNetwork& net, const GridOptions& opts = {});

/// Entangled-probe weight w_1 in [0, 1] for two nodes; argmin = {w_1}.
GridMinimum grid_weights_entangled_two_node(const std::vector<double>& etas, double total_photons,
                                            const GridOptions& opts = {});

/// Joint (w_1, N_1) search for the product probe on two nodes; argmin = {w_1, N_1}.
GridMinimum grid_joint_product_two_node(const std::vector<double>& etas, double total_photons,
                                        const GridOptions& opts = {.points = 200});

}  // namespace cvsense
