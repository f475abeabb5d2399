#include "cvsense/grid_search.hpp"

#include <algorithm>
#include <cmath>

#include "cvsense/error.hpp"

namespace cvsense {

namespace {

double node_axis(double lo, double hi, int points, int i) {
    return i == points - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
}

void require_two_nodes(const std::vector<double>& etas) {
    if (etas.size() != 2) throw DomainError("grid oracles handle two-node networks only");
}

}  // namespace

GridMinimum grid_minimize_1d(const std::function<double(double)>& f, double lo, double hi, const GridOptions& opts) {
    if (!(hi > lo) || opts.points < 3 || opts.refine_points < 3) throw DomainError("bad grid specification");
    const double width = hi - lo;
    GridMinimum best;
    best.argmin = {lo};
    best.value = HUGE_VAL;
    double a = lo;
    double b = hi;
    int points = opts.points;
    for (int round = 0; round < opts.max_rounds; ++round) {
        std::vector<double> values(static_cast<std::size_t>(points));
#pragma omp parallel for schedule(static)
        for (int i = 0; i < points; ++i) values[i] = f(node_axis(a, b, points, i));
        best.evaluations += points;
        const auto it = std::min_element(values.begin(), values.end());
        const double x = node_axis(a, b, points, static_cast<int>(it - values.begin()));
        if (*it < best.value) {
            best.value = *it;
            best.argmin[0] = x;
        }
        const double cell = (b - a) / (points - 1);
        if (cell < opts.resolution * width) break;
        a = std::max(lo, best.argmin[0] - 2.0 * cell);
        b = std::min(hi, best.argmin[0] + 2.0 * cell);
        points = opts.refine_points;
    }
    return best;
}

GridMinimum grid_minimize_2d(const std::function<double(double, double)>& f, double lo0, double hi0, double lo1,
                             double hi1, const GridOptions& opts) {
    if (!(hi0 > lo0) || !(hi1 > lo1) || opts.points < 3 || opts.refine_points < 3) {
        throw DomainError("bad grid specification");
    }
    GridMinimum best;
    best.argmin = {lo0, lo1};
    best.value = HUGE_VAL;
    double a0 = lo0, b0 = hi0, a1 = lo1, b1 = hi1;
    int points = opts.points;
    for (int round = 0; round < opts.max_rounds; ++round) {
        const long total = static_cast<long>(points) * points;
        std::vector<double> values(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
        for (long k = 0; k < total; ++k) {
            const int i = static_cast<int>(k / points);
            const int j = static_cast<int>(k % points);
            values[k] = f(node_axis(a0, b0, points, i), node_axis(a1, b1, points, j));
        }
        best.evaluations += total;
        const long k = std::min_element(values.begin(), values.end()) - values.begin();
        if (values[k] < best.value) {
            best.value = values[k];
            best.argmin = {node_axis(a0, b0, points, static_cast<int>(k / points)),
                           node_axis(a1, b1, points, static_cast<int>(k % points))};
        }
        const double cell0 = (b0 - a0) / (points - 1);
        const double cell1 = (b1 - a1) / (points - 1);
        if (cell0 < opts.resolution * (hi0 - lo0) && cell1 < opts.resolution * (hi1 - lo1)) break;
        a0 = std::max(lo0, best.argmin[0] - 2.0 * cell0);
        b0 = std::min(hi0, best.argmin[0] + 2.0 * cell0);
        a1 = std::max(lo1, best.argmin[1] - 2.0 * cell1);
        b1 = std::min(hi1, best.argmin[1] + 2.0 * cell1);
        points = opts.refine_points;
    }
    return best;
}

GridMinimum grid_allocation_two_node(const WeightedNetwork& net, const GridOptions& opts) {
    require_two_nodes(net.etas());
    const double total = net.total_photons();
    if (!(total > 0.0)) throw DomainError("grid allocation needs N_S > 0");
    return grid_minimize_1d(
        [&](double n1) {
            return product_rms_for_allocation(net, {n1, std::max(0.0, total - n1)});
        },
        0.0, total, opts);
}

GridMinimum grid_weights_entangled_two_node(const std::vector<double>& etas, double total_photons,
                                            const GridOptions& opts) {
    require_two_nodes(etas);
    return grid_minimize_1d(
        [&](double w1) {
            return weighted_entangled_rms(WeightedNetwork({w1, 1.0 - w1}, etas, total_photons));
        },
        0.0, 1.0, opts);
}

GridMinimum grid_joint_product_two_node(const std::vector<double>& etas, double total_photons,
                                        const GridOptions& opts) {
    require_two_nodes(etas);
    if (!(total_photons > 0.0)) throw DomainError("grid allocation needs N_S > 0");
    return grid_minimize_2d(
        [&](double w1, double n1) {
            const WeightedNetwork net({w1, 1.0 - w1}, etas, total_photons);
            return product_rms_for_allocation(net, {n1, std::max(0.0, total_photons - n1)});
        },
        0.0, 1.0, 0.0, total_photons, opts);
}

}  // namespace cvsense
