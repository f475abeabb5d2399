#pragma once

// Distributed displacement sensing with entangled (split squeezed vacuum) and product
// (independent squeezed vacua) probes, plus the Mach-Zehnder phase-sensing network.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvsense/execution.hpp"
#include "cvsense/gaussian.hpp"

namespace cvsense {

enum class Scheme { entangled, product };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

// ---------------------------------------------------------------- closed forms

/// rms error of the entangled probe:
/// (1/2) sqrt[eta / (M (sqrt(N_S+1) + sqrt(N_S))^2) + (1-eta)/M].
double entangled_rms_error(int num_nodes, double total_photons, double eta);

/// rms error of the best product probe (N_S/M photons per node).
double product_rms_error(int num_nodes, double total_photons, double eta);

double rms_error(Scheme scheme, int num_nodes, double total_photons, double eta);

/// 10 log10[(product rms / entangled rms)^2].
double sensitivity_ratio_db(int num_nodes, double total_photons, double eta);

/// Squeezing of a squeezed vacuum with `photons` photons, 10 log10 e^{2r}.
double squeezing_db(double photons);

/// Linearised phase-estimation rms of the interferometer network:
/// (1/sqrt(N_v)) sqrt[eta / (M (sqrt(N_S+1) + sqrt(N_S))^2) + (1-eta)/M].
double phase_rms_error(int num_nodes, double total_photons, double drive_photons, double eta);

/// First-order rms of the phase estimator when loss acts after the interferometers, so
/// the signal is attenuated too: phase_rms_error / sqrt(eta).
double phase_rms_error_attenuated(int num_nodes, double total_photons, double drive_photons, double eta);

/// Least-squares slope of log10(rms) against log10(M) with N_S = n_S * M per point.
/// Needs >= 3 node counts spanning >= 2 decades.
double scaling_exponent(Scheme scheme, double eta, double photons_per_node, std::span<const int> node_counts);

// -------------------------------------------------------------------- probes

/// Squeezed vacuum (quiet quadrature `squeezed`) on mode 1, vacua elsewhere, through the
/// balanced splitter.
GaussianState build_entangled_input(int num_nodes, double total_photons, Quadrature squeezed = Quadrature::x);

/// Same, through an unbalanced splitter with first combination `coeffs`.
GaussianState build_weighted_entangled_input(const Vector& coeffs, double total_photons);

/// Tensor product of x-squeezed vacua with the given photon numbers.
GaussianState build_product_input(std::span<const double> photons);
GaussianState build_product_input(int num_nodes, double total_photons);

/// Var[Re(b_1)] with b_1 = sum_m a_m / sqrt(M), read from the x-block covariance.
double collective_x_variance(const GaussianState& state);

// ------------------------------------------------------------------- campaigns

struct SensorNetworkConfig {
    int num_nodes = 1;
    double total_photons = 0.0;
    /// One value (uniform) or one per node.
    std::vector<double> etas = {1.0};
    /// Empty means uniform 1/M.
    std::vector<double> weights;
    Scheme scheme = Scheme::entangled;
    double alpha = 0.0;
    std::uint64_t seed = 1;
    std::int64_t trials = 1000;

    void validate() const;
    std::vector<double> node_etas() const;
    std::vector<double> node_weights() const;
    bool is_uniform() const;
};

struct EstimatorReport {
    Scheme scheme = Scheme::entangled;
    std::int64_t trials = 0;
    double empirical_mean = 0.0;
    double empirical_rms_error = 0.0;
    /// empirical_rms_error / sqrt(2 trials).
    double rms_standard_error = 0.0;
    double analytic_rms = 0.0;
    /// The sqrt(eta) <a_m> term removed from each outcome; zero for the zero-mean probes used here.
    double mean_offset = 0.0;

    /// |empirical rms - analytic| in units of rms_standard_error.
    double rms_z_score() const;
};

/// Probe state fed to the loss channels for a configuration. Non-uniform settings use the
/// unbalanced splitter with coefficients w_m sqrt(eta_m) (entangled) or the optimal
/// photon allocation (product).
GaussianState network_input(const SensorNetworkConfig& cfg);

/// Closed-form rms error matching network_input(cfg).
double network_analytic_rms(const SensorNetworkConfig& cfg);

/// Homodyne-state pipeline: input -> loss -> displacement -> x homodyne on every node,
/// estimate sum_m w_m x_m per trial.
EstimatorReport simulate_displacement_protocol(const SensorNetworkConfig& cfg,
                                               Execution exec = Execution::parallel);

// -------------------------------------------------------------- phase sensing

inline constexpr double kMaxPhaseShift = 0.3;

struct PhaseNetworkConfig {
    int num_nodes = 1;
    double total_photons = 0.0;
    double drive_photons = 100.0;
    double eta = 1.0;
    double phase = 0.0;
    std::uint64_t seed = 1;
    std::int64_t trials = 1000;

    void validate() const;
};

struct PhaseReport {
    EstimatorReport estimator;
    /// rms of the estimator computed from the simulated state's moments (no sampling noise).
    double exact_rms = 0.0;
    /// Estimator bias from the simulated state's moments.
    double exact_bias = 0.0;
    /// First-order rms including the attenuated signal (phase_rms_error_attenuated).
    double linearized_rms = 0.0;
    /// exact_rms - linearized_rms.
    double linearization_residual() const { return exact_rms - linearized_rms; }
};

/// Joint state of the a-mode outputs of every interferometer after loss, modes in node order.
/// Node m mixes entangled input a_m (p-squeezed share) with coherent drive |sqrt(N_v)> on v_m:
/// 50:50 splitter, phase exp(-i phase) on the difference arm, 50:50 splitter, so to first order
/// a'_m = (1 - i phase/2) a_m + i phase v_m / 2, followed by loss eta.
GaussianState phase_network_output(const PhaseNetworkConfig& cfg);

/// Exact Gaussian simulation with p homodyne and estimator 2 sum_m p_m / (sqrt(eta N_v) M).
PhaseReport simulate_phase_protocol(const PhaseNetworkConfig& cfg, Execution exec = Execution::parallel);

}  // namespace cvsense
