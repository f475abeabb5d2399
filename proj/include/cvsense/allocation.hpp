#pragma once

// Weighted-sum sensing over nodes with unequal, known transmissivities.
//
// The target is sum_m w_m alpha_m. Per node the product-probe noise is
//   c_m(N) = eta_m g(N) + 1 - eta_m,   g(N) = 1 / (sqrt(N+1) + sqrt(N))^2,
// and the rms error is (1/2) sqrt(sum_m w_m^2 c_m(N_m)).

#include <vector>

namespace cvsense {

class WeightedNetwork {
public:
    /// weights: nonnegative, summing to 1 within 1e-12; etas in (0, 1]; N_S >= 0.
    WeightedNetwork(std::vector<double> weights, std::vector<double> etas, double total_photons);

    /// Uniform weights 1/M.
    static WeightedNetwork uniform(std::vector<double> etas, double total_photons);

    int num_nodes() const noexcept { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& etas() const noexcept { return etas_; }
    double total_photons() const noexcept { return total_photons_; }

private:
    std::vector<double> weights_;
    std::vector<double> etas_;
    double total_photons_;
};

/// g(N) = (sqrt(N+1) - sqrt(N))^2.
double squeezed_noise_factor(double photons);

/// Closed-form rms error of the entangled probe with the splitter matched to w_m sqrt(eta_m).
double weighted_entangled_rms(const WeightedNetwork& net);

/// Same quantity through (w_bar / 2) sqrt[eta_bar g(N_S) + 1 - eta_bar].
double weighted_entangled_rms_moments(const WeightedNetwork& net);

/// (1/2) sqrt(sum_m w_m^2 c_m(N_m)) for a given photon allocation.
double product_rms_for_allocation(const WeightedNetwork& net, const std::vector<double>& photons);

struct AllocationResult {
    std::vector<double> photons;  // sums to N_S
    double objective = 0.0;       // rms error
    double kkt_residual = 0.0;    // max relative |w^2 eta g'(N) + lambda| / lambda over active nodes
    double multiplier = 0.0;      // lambda
    int iterations = 0;
};

inline constexpr int kAllocationMaxIterations = 200;

/// Water-filling solution of min sum_m w_m^2 c_m(N_m) subject to sum N_m = N_S, N_m >= 0.
/// Every node with w_m eta_m > 0 gets a positive share; the rest get none.
/// Requires N_S > 0. Throws ConvergenceError when the KKT residual exceeds 1e-8.
AllocationResult allocate_photons_product(const WeightedNetwork& net);

struct WeightedOptimum {
    std::vector<double> weights;
    double objective = 0.0;  // rms error
};

/// Weights minimising the entangled rms for a common displacement: w_m proportional to
/// 1/c_m(N_S).
WeightedOptimum optimal_weights_entangled(const std::vector<double>& etas, double total_photons);

struct ProductOptimum {
    std::vector<double> weights;
    AllocationResult allocation;
    /// Objective after each alternation (non-increasing).
    std::vector<double> history;
};

inline constexpr int kAlternationMaxIterations = 10000;

/// Alternates closed-form weights (w_m proportional to 1/c_m(N_m)) with photon allocation
/// until the objective changes by less than 1e-12. Throws ConvergenceError after
/// `max_iterations` alternations.
ProductOptimum optimal_weights_product(const std::vector<double>& etas, double total_photons,
                                       int max_iterations = kAlternationMaxIterations);

}  // namespace cvsense
