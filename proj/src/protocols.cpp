#include "cvsense/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cvsense/allocation.hpp"
#include "cvsense/error.hpp"
#include "cvsense/monte_carlo.hpp"

namespace cvsense {

namespace {

constexpr double kWeightSumTol = 1e-12;

void require_network(int num_nodes, double total_photons, double eta) {
    if (num_nodes < 1) throw DomainError("number of nodes must be >= 1");
    if (!(total_photons >= 0.0) || !std::isfinite(total_photons)) {
        throw DomainError("photon number must be finite and >= 0");
    }
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw DomainError("transmissivity must lie in (0, 1], got " + std::to_string(eta));
    }
}

// (1/2) sqrt[eta g(N) / M + (1 - eta) / M]
double rms_from_node_photons(int num_nodes, double node_photons, double eta) {
    const double m = num_nodes;
    return 0.5 * std::sqrt(eta / (m * squeeze_gain(node_photons)) + (1.0 - eta) / m);
}

EstimatorReport make_report(Scheme scheme, const TrialMoments& moments, double analytic, double offset) {
    EstimatorReport r;
    r.scheme = scheme;
    r.trials = moments.trials;
    r.empirical_mean = moments.mean();
    r.empirical_rms_error = moments.rms_error();
    r.rms_standard_error = r.empirical_rms_error / std::sqrt(2.0 * static_cast<double>(moments.trials));
    r.analytic_rms = analytic;
    r.mean_offset = offset;
    return r;
}

}  // namespace

std::string_view to_string(Scheme scheme) { return scheme == Scheme::entangled ? "entangled" : "product"; }

Scheme parse_scheme(std::string_view text) {
    if (text == "entangled") return Scheme::entangled;
    if (text == "product") return Scheme::product;
    throw DomainError("unknown scheme '" + std::string(text) + "' (expected entangled or product)");
}

// --------------------------------------------------------------- closed forms

double entangled_rms_error(int num_nodes, double total_photons, double eta) {
    require_network(num_nodes, total_photons, eta);
    return rms_from_node_photons(num_nodes, total_photons, eta);
}

double product_rms_error(int num_nodes, double total_photons, double eta) {
    require_network(num_nodes, total_photons, eta);
    return rms_from_node_photons(num_nodes, total_photons / num_nodes, eta);
}

double rms_error(Scheme scheme, int num_nodes, double total_photons, double eta) {
    return scheme == Scheme::entangled ? entangled_rms_error(num_nodes, total_photons, eta)
                                       : product_rms_error(num_nodes, total_photons, eta);
}

double sensitivity_ratio_db(int num_nodes, double total_photons, double eta) {
    const double ratio =
        product_rms_error(num_nodes, total_photons, eta) / entangled_rms_error(num_nodes, total_photons, eta);
    return 20.0 * std::log10(ratio);
}

double squeezing_db(double photons) { return 10.0 * std::log10(squeeze_gain(photons)); }

double phase_rms_error(int num_nodes, double total_photons, double drive_photons, double eta) {
    if (!(drive_photons > 0.0)) throw DomainError("drive photon number N_v must be > 0");
    return 2.0 * entangled_rms_error(num_nodes, total_photons, eta) / std::sqrt(drive_photons);
}

double phase_rms_error_attenuated(int num_nodes, double total_photons, double drive_photons, double eta) {
    return phase_rms_error(num_nodes, total_photons, drive_photons, eta) / std::sqrt(eta);
}

double scaling_exponent(Scheme scheme, double eta, double photons_per_node, std::span<const int> node_counts) {
    if (node_counts.size() < 3) {
        throw DomainError("scaling fit needs at least 3 node counts");
    }
    const auto [lo, hi] = std::minmax_element(node_counts.begin(), node_counts.end());
    if (*lo < 1) throw DomainError("node counts must be >= 1");
    if (static_cast<double>(*hi) < 100.0 * static_cast<double>(*lo)) {
        throw DomainError("node counts must span at least two decades");
    }
    const auto n = static_cast<double>(node_counts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int m : node_counts) {
        const double x = std::log10(static_cast<double>(m));
        const double y = std::log10(rms_error(scheme, m, photons_per_node * m, eta));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// --------------------------------------------------------------------- probes

GaussianState build_entangled_input(int num_nodes, double total_photons, Quadrature squeezed) {
    if (num_nodes < 1) throw DomainError("number of nodes must be >= 1");
    GaussianState probe = squeezed_vacuum(total_photons, squeezed);
    if (num_nodes == 1) return probe;
    return apply_symplectic(tensor_product(probe, vacuum_state(num_nodes - 1)), balanced_splitter(num_nodes));
}

GaussianState build_weighted_entangled_input(const Vector& coeffs, double total_photons) {
    GaussianState probe = squeezed_vacuum(total_photons, Quadrature::x);
    const auto m = static_cast<int>(coeffs.size());
    if (m > 1) probe = tensor_product(probe, vacuum_state(m - 1));
    return apply_symplectic(probe, unbalanced_splitter(coeffs));
}

GaussianState build_product_input(std::span<const double> photons) {
    if (photons.empty()) throw DomainError("product probe needs at least one node");
    GaussianState state = squeezed_vacuum(photons[0], Quadrature::x);
    for (std::size_t m = 1; m < photons.size(); ++m) {
        state = tensor_product(state, squeezed_vacuum(photons[m], Quadrature::x));
    }
    return state;
}

GaussianState build_product_input(int num_nodes, double total_photons) {
    if (num_nodes < 1) throw DomainError("number of nodes must be >= 1");
    if (!(total_photons >= 0.0)) throw DomainError("photon number must be >= 0");
    const std::vector<double> photons(static_cast<std::size_t>(num_nodes), total_photons / num_nodes);
    return build_product_input(photons);
}

double collective_x_variance(const GaussianState& state) {
    return state.quadrature_cov(Quadrature::x).sum() / state.num_modes();
}

// ------------------------------------------------------------------ campaigns

void SensorNetworkConfig::validate() const {
    if (num_nodes < 1) throw DomainError("number of nodes M must be >= 1");
    if (!(total_photons >= 0.0) || !std::isfinite(total_photons)) {
        throw DomainError("total photon number N_S must be finite and >= 0");
    }
    if (etas.size() != 1 && etas.size() != static_cast<std::size_t>(num_nodes)) {
        throw DomainError("eta must be a single value or one value per node");
    }
    for (double eta : etas) {
        if (!(eta > 0.0 && eta <= 1.0)) {
            throw DomainError("transmissivity must lie in (0, 1], got " + std::to_string(eta));
        }
    }
    if (!weights.empty()) {
        if (weights.size() != static_cast<std::size_t>(num_nodes)) {
            throw DomainError("weights need one value per node");
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw DomainError("weights must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > kWeightSumTol) throw DomainError("weights must sum to 1");
    }
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
}

std::vector<double> SensorNetworkConfig::node_etas() const {
    if (etas.size() == 1) return std::vector<double>(static_cast<std::size_t>(num_nodes), etas[0]);
    return etas;
}

std::vector<double> SensorNetworkConfig::node_weights() const {
    if (weights.empty()) return std::vector<double>(static_cast<std::size_t>(num_nodes), 1.0 / num_nodes);
    return weights;
}

bool SensorNetworkConfig::is_uniform() const {
    const auto e = node_etas();
    const auto w = node_weights();
    const double uniform_w = 1.0 / num_nodes;
    return std::all_of(e.begin(), e.end(), [&](double x) { return x == e[0]; }) &&
           std::all_of(w.begin(), w.end(), [&](double x) { return std::abs(x - uniform_w) <= kWeightSumTol; });
}

GaussianState network_input(const SensorNetworkConfig& cfg) {
    cfg.validate();
    if (cfg.is_uniform()) {
        return cfg.scheme == Scheme::entangled ? build_entangled_input(cfg.num_nodes, cfg.total_photons)
                                               : build_product_input(cfg.num_nodes, cfg.total_photons);
    }
    const auto etas = cfg.node_etas();
    const auto weights = cfg.node_weights();
    if (cfg.scheme == Scheme::entangled) {
        Vector coeffs(cfg.num_nodes);
        for (int m = 0; m < cfg.num_nodes; ++m) coeffs(m) = weights[m] * std::sqrt(etas[m]);
        return build_weighted_entangled_input(coeffs, cfg.total_photons);
    }
    if (cfg.total_photons == 0.0) return vacuum_state(cfg.num_nodes);
    const AllocationResult alloc = allocate_photons_product(WeightedNetwork(weights, etas, cfg.total_photons));
    return build_product_input(alloc.photons);
}

double network_analytic_rms(const SensorNetworkConfig& cfg) {
    cfg.validate();
    if (cfg.is_uniform()) {
        return rms_error(cfg.scheme, cfg.num_nodes, cfg.total_photons, cfg.node_etas()[0]);
    }
    const WeightedNetwork net(cfg.node_weights(), cfg.node_etas(), cfg.total_photons);
    if (cfg.scheme == Scheme::entangled) return weighted_entangled_rms(net);
    if (cfg.total_photons == 0.0) {
        return product_rms_for_allocation(net, std::vector<double>(static_cast<std::size_t>(cfg.num_nodes), 0.0));
    }
    return allocate_photons_product(net).objective;
}

EstimatorReport simulate_displacement_protocol(const SensorNetworkConfig& cfg, Execution exec) {
    cfg.validate();
    const GaussianState input = network_input(cfg);
    const std::vector<double> etas = cfg.node_etas();
    const std::vector<double> weights = cfg.node_weights();

    // Loss first, then the displacement, then x homodyne on every node.
    const GaussianState received = displace_all(apply_loss(input, LossChannel(etas)), cfg.alpha);
    const HomodyneSampler sampler(received, Quadrature::x);

    Vector coeffs(cfg.num_nodes);
    double offset = 0.0;
    const Vector input_mean = input.quadrature_mean(Quadrature::x);
    for (int m = 0; m < cfg.num_nodes; ++m) {
        coeffs(m) = weights[m];
        offset += weights[m] * std::sqrt(etas[m]) * input_mean(m);
    }
    const LinearEstimatorKernel kernel{sampler, coeffs, offset, cfg.alpha};
    return make_report(cfg.scheme, kernel.run(cfg.trials, cfg.seed, exec), network_analytic_rms(cfg), offset);
}

double EstimatorReport::rms_z_score() const {
    return std::abs(empirical_rms_error - analytic_rms) / rms_standard_error;
}

// -------------------------------------------------------------- phase sensing

void PhaseNetworkConfig::validate() const {
    if (num_nodes < 1) throw DomainError("number of nodes M must be >= 1");
    if (!(total_photons >= 0.0) || !std::isfinite(total_photons)) {
        throw DomainError("total photon number N_S must be finite and >= 0");
    }
    if (!(drive_photons > 0.0) || !std::isfinite(drive_photons)) {
        throw DomainError("drive photon number N_v must be > 0");
    }
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("transmissivity must lie in (0, 1]");
    if (!(std::abs(phase) < kMaxPhaseShift)) {
        throw DomainError("phase shift must satisfy |phase| < 0.3 for the linearised estimator");
    }
    if (trials < 1) throw DomainError("trials must be >= 1");
}

GaussianState phase_network_output(const PhaseNetworkConfig& cfg) {
    cfg.validate();
    const int m = cfg.num_nodes;
    const GaussianState probes = build_entangled_input(m, cfg.total_photons, Quadrature::p);
    GaussianState drives = coherent_state(std::sqrt(cfg.drive_photons), 0.0);
    for (int k = 1; k < m; ++k) drives = tensor_product(drives, coherent_state(std::sqrt(cfg.drive_photons), 0.0));
    // Modes 0..M-1 are the probe inputs a_m, modes M..2M-1 the drives v_m.
    const GaussianState joint = tensor_product(probes, drives);

    const double h = 1.0 / std::sqrt(2.0);
    ComplexMatrix splitter = ComplexMatrix::Zero(2 * m, 2 * m);
    ComplexMatrix phase = ComplexMatrix::Identity(2 * m, 2 * m);
    for (int k = 0; k < m; ++k) {
        // Sum arm on index k, difference arm on index M + k.
        splitter(k, k) = h;
        splitter(k, m + k) = h;
        splitter(m + k, k) = h;
        splitter(m + k, m + k) = -h;
        phase(m + k, m + k) = std::polar(1.0, -cfg.phase);
    }
    const ComplexMatrix interferometer = splitter * phase * splitter;
    const GaussianState mixed = apply_symplectic(joint, passive_transform(interferometer));

    std::vector<double> etas(static_cast<std::size_t>(2 * m), 1.0);
    std::fill(etas.begin(), etas.begin() + m, cfg.eta);
    const GaussianState lossy = apply_loss(mixed, LossChannel(std::move(etas)));

    std::vector<int> outputs(static_cast<std::size_t>(m));
    std::iota(outputs.begin(), outputs.end(), 0);
    return lossy.reduced(outputs);
}

PhaseReport simulate_phase_protocol(const PhaseNetworkConfig& cfg, Execution exec) {
    cfg.validate();
    const int m = cfg.num_nodes;
    const GaussianState out = phase_network_output(cfg);
    const double scale = 2.0 / (std::sqrt(cfg.eta * cfg.drive_photons) * m);
    const Vector coeffs = Vector::Constant(m, scale);

    PhaseNetworkConfig reference = cfg;
    reference.phase = 0.0;
    const double offset = coeffs.dot(phase_network_output(reference).quadrature_mean(Quadrature::p));

    const HomodyneSampler sampler(out, Quadrature::p);
    const LinearEstimatorKernel kernel{sampler, coeffs, offset, cfg.phase};

    PhaseReport report;
    report.estimator = make_report(Scheme::entangled, kernel.run(cfg.trials, cfg.seed, exec),
                                   phase_rms_error(m, cfg.total_photons, cfg.drive_photons, cfg.eta), offset);
    const double mean = coeffs.dot(out.quadrature_mean(Quadrature::p)) - offset;
    const double variance = coeffs.dot(out.quadrature_cov(Quadrature::p) * coeffs);
    report.exact_bias = mean - cfg.phase;
    report.exact_rms = std::sqrt(variance + report.exact_bias * report.exact_bias);
    report.linearized_rms = phase_rms_error_attenuated(m, cfg.total_photons, cfg.drive_photons, cfg.eta);
    return report;
}

}  // namespace cvsense
