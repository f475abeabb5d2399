#include "cvsense/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cvsense/error.hpp"

namespace cvsense {

namespace {

constexpr double kSimplexTol = 1e-12;
constexpr double kBracketFloor = 1e-12;
constexpr double kKktTol = 1e-8;
constexpr double kAlternationTol = 1e-12;

// -g'(N) = g(N) / sqrt(N (N + 1)); strictly decreasing from +inf to 0.
double marginal_gain(double photons) {
    return squeezed_noise_factor(photons) / std::sqrt(photons * (photons + 1.0));
}

// Inverse of marginal_gain. With t = sqrt(N+1) - sqrt(N), marginal_gain = 4 t^4 / (1 - t^4).
double photons_for_gain(double gain) {
    const double t2 = std::sqrt(gain / (4.0 + gain));
    const double one_minus_t2 = (4.0 / (4.0 + gain)) / (1.0 + t2);
    const double half_gap = one_minus_t2 / (2.0 * std::sqrt(t2));
    return half_gap * half_gap;
}

double node_noise(double eta, double photons) { return eta * squeezed_noise_factor(photons) + 1.0 - eta; }

}  // namespace

WeightedNetwork::WeightedNetwork(std::vector<double> weights, std::vector<double> etas, double total_photons)
    : weights_(std::move(weights)), etas_(std::move(etas)), total_photons_(total_photons) {
    if (weights_.empty()) {
        throw DomainError("network needs at least one node");
    }
    if (weights_.size() != etas_.size()) {
        throw DomainError("weights and transmissivities differ in length");
    }
    if (!(total_photons_ >= 0.0) || !std::isfinite(total_photons_)) {
        throw DomainError("total photon number must be finite and >= 0");
    }
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw DomainError("weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
        throw DomainError("weights must sum to 1 (sum is " + std::to_string(sum) + ")");
    }
    for (double eta : etas_) {
        if (!(eta > 0.0 && eta <= 1.0)) {
            throw DomainError("transmissivity must lie in (0, 1], got " + std::to_string(eta));
        }
    }
}

WeightedNetwork WeightedNetwork::uniform(std::vector<double> etas, double total_photons) {
    const std::size_t m = etas.size();
    if (m == 0) throw DomainError("network needs at least one node");
    return WeightedNetwork(std::vector<double>(m, 1.0 / static_cast<double>(m)), std::move(etas), total_photons);
}

double squeezed_noise_factor(double photons) {
    if (!(photons >= 0.0)) {
        throw DomainError("photon number must be >= 0");
    }
    const double s = std::sqrt(photons + 1.0) + std::sqrt(photons);
    return 1.0 / (s * s);
}

double weighted_entangled_rms(const WeightedNetwork& net) {
    const double g = squeezed_noise_factor(net.total_photons());
    double acc = 0.0;
    for (int m = 0; m < net.num_nodes(); ++m) {
        const double w = net.weights()[m];
        acc += w * w * (net.etas()[m] * g + 1.0 - net.etas()[m]);
    }
    return 0.5 * std::sqrt(acc);
}

double weighted_entangled_rms_moments(const WeightedNetwork& net) {
    double w2 = 0.0;
    double w2eta = 0.0;
    for (int m = 0; m < net.num_nodes(); ++m) {
        const double w = net.weights()[m];
        w2 += w * w;
        w2eta += w * w * net.etas()[m];
    }
    const double w_bar = std::sqrt(w2);
    const double eta_bar = w2eta / w2;
    return 0.5 * w_bar * std::sqrt(eta_bar * squeezed_noise_factor(net.total_photons()) + 1.0 - eta_bar);
}

double product_rms_for_allocation(const WeightedNetwork& net, const std::vector<double>& photons) {
    if (photons.size() != net.weights().size()) {
        throw DomainError("allocation length does not match the network");
    }
    double acc = 0.0;
    for (std::size_t m = 0; m < photons.size(); ++m) {
        const double w = net.weights()[m];
        acc += w * w * node_noise(net.etas()[m], photons[m]);
    }
    return 0.5 * std::sqrt(acc);
}

AllocationResult allocate_photons_product(const WeightedNetwork& net) {
    const double total = net.total_photons();
    if (!(total > 0.0)) {
        throw DomainError("photon allocation needs N_S > 0");
    }
    const std::size_t m = net.weights().size();
    std::vector<double> scale(m);  // w_m^2 eta_m
    for (std::size_t i = 0; i < m; ++i) scale[i] = net.weights()[i] * net.weights()[i] * net.etas()[i];

    auto allocation_at = [&](double lambda) {
        std::vector<double> photons(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (scale[i] > 0.0) photons[i] = photons_for_gain(lambda / scale[i]);
        }
        return photons;
    };
    auto total_at = [&](double lambda) {
        const auto p = allocation_at(lambda);
        return std::accumulate(p.begin(), p.end(), 0.0);
    };

    const double floor = std::min(kBracketFloor, total / (2.0 * static_cast<double>(m)));
    double lo = HUGE_VAL;
    double hi = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (scale[i] <= 0.0) continue;
        lo = std::min(lo, scale[i] * marginal_gain(total));
        hi = std::max(hi, scale[i] * marginal_gain(floor));
    }

    AllocationResult result;
    // Bisection on log(lambda); total_at is decreasing in lambda.
    for (; result.iterations < kAllocationMaxIterations; ++result.iterations) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) break;
        if (total_at(mid) > total) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double lambda = std::sqrt(lo * hi);
    result.photons = allocation_at(lambda);
    const double sum = std::accumulate(result.photons.begin(), result.photons.end(), 0.0);
    for (double& p : result.photons) p *= total / sum;

    result.multiplier = lambda;
    for (std::size_t i = 0; i < m; ++i) {
        if (scale[i] <= 0.0) continue;
        const double dev = std::abs(scale[i] * marginal_gain(result.photons[i]) - lambda) / lambda;
        result.kkt_residual = std::max(result.kkt_residual, dev);
    }
    result.objective = product_rms_for_allocation(net, result.photons);
    if (!(result.kkt_residual < kKktTol)) {
        throw ConvergenceError("photon allocation did not reach KKT stationarity", result.kkt_residual);
    }
    return result;
}

WeightedOptimum optimal_weights_entangled(const std::vector<double>& etas, double total_photons) {
    // Validates the transmissivities and photon number.
    const WeightedNetwork probe = WeightedNetwork::uniform(etas, total_photons);
    WeightedOptimum out;
    out.weights.resize(etas.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < etas.size(); ++i) {
        out.weights[i] = 1.0 / node_noise(etas[i], total_photons);
        norm += out.weights[i];
    }
    for (double& w : out.weights) w /= norm;
    out.objective = weighted_entangled_rms(WeightedNetwork(out.weights, probe.etas(), total_photons));
    return out;
}

ProductOptimum optimal_weights_product(const std::vector<double>& etas, double total_photons, int max_iterations) {
    if (max_iterations < 1) throw DomainError("alternation cap must be >= 1");
    const std::size_t m = etas.size();
    ProductOptimum out;
    out.weights = WeightedNetwork::uniform(etas, total_photons).weights();
    out.allocation = allocate_photons_product(WeightedNetwork(out.weights, etas, total_photons));
    out.history.push_back(out.allocation.objective);

    for (int it = 0; it < max_iterations; ++it) {
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            out.weights[i] = 1.0 / node_noise(etas[i], out.allocation.photons[i]);
            norm += out.weights[i];
        }
        for (double& w : out.weights) w /= norm;
        out.allocation = allocate_photons_product(WeightedNetwork(out.weights, etas, total_photons));
        out.history.push_back(out.allocation.objective);
        const double change = out.history[out.history.size() - 2] - out.history.back();
        if (std::abs(change) < kAlternationTol) return out;
    }
    throw ConvergenceError("weight/photon alternation hit the iteration cap",
                           out.history[out.history.size() - 2] - out.history.back());
}

}  // namespace cvsense
