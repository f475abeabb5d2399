#pragma once

// Quantum Fisher information for displacement sensing with Gaussian probes.
//
// Single-mode probes use the rotated squeezed-thermal parametrisation
//   V = R(theta) diag[(2n+1) e^{-r_B} / 4, (2n+1) e^{r_B} / 4] R(theta)^T,
// whose r_B is twice the squeeze parameter of squeezed_vacuum().

#include <vector>

#include "cvsense/gaussian.hpp"

namespace cvsense {

struct SqueezedThermalParams {
    double r_b = 0.0;    // >= 0; variance ratio e^{2 r_b} between the two principal axes
    double n = 0.0;      // thermal occupation, >= 0
    double theta = 0.0;  // rotation of the principal axes
    double mean_x = 0.0;
    double mean_p = 0.0;

    void validate() const;
    /// Covariance R V_diag R^T.
    Matrix covariance() const;
    GaussianState state() const;
    /// <x^2> + <p^2> - 1/2 = a^T a + (2n+1) cosh(r_b)/2 - 1/2.
    double mean_photon_number() const;
};

/// Uhlmann fidelity of two single-mode Gaussian states (closed form, vacuum variance 1/4).
double gaussian_fidelity(const GaussianState& a, const GaussianState& b);

/// log of gaussian_fidelity, accurate when the fidelity is close to 1.
double gaussian_log_fidelity(const GaussianState& a, const GaussianState& b);

/// Probe state after loss and displacement: rho_G(sqrt(eta) a + [alpha, 0], eta V + (1-eta) I/4).
GaussianState lossy_probe(const SqueezedThermalParams& params, double eta, double alpha = 0.0);

inline const std::vector<double> kDefaultFisherSteps = {1e-2, 5e-3, 2.5e-3};

struct FisherEstimate {
    double value = 0.0;
    /// Finite-difference quotients 8(1 - sqrt F)/eps^2, one per step.
    std::vector<double> quotients;
    /// |last extrapolation update|, a convergence indicator.
    double extrapolation_error = 0.0;
};

/// Fisher information from the fidelity decay 8{1 - sqrt F[rho(alpha), rho(alpha + eps)]}/eps^2,
/// extrapolated to eps -> 0 (Neville in eps^2). Steps must be strictly decreasing and lie in
/// (1e-6, 1e-1). Throws ConvergenceError if the extrapolation updates do not shrink.
FisherEstimate fisher_numeric(const SqueezedThermalParams& params, double eta,
                              const std::vector<double>& steps = kDefaultFisherSteps, double alpha = 0.0);

/// Closed-form Fisher information of the lossy single-mode probe.
double fisher_closed_form(const SqueezedThermalParams& params, double eta);

struct FisherMaximum {
    double value = 0.0;
    SqueezedThermalParams argmax;  // theta = n = 0, zero mean, r_B = arccosh(2N + 1)
};

/// Maximum of the Fisher information over single-mode Gaussian probes with N mean photons:
/// [eta / (4 (sqrt(N+1) + sqrt(N))^2) + (1 - eta)/4]^{-1}.
FisherMaximum fisher_max(double photons, double eta);

/// Cramer-Rao bound for Gaussian separable probes with total N_S photons over M nodes.
/// Built from additivity over the equal-split optimum: 1 / sqrt(M * fisher_max(N_S/M, eta)).
double cr_bound_separable(int num_nodes, double total_photons, double eta);

/// Fisher information for the mean shift  mean -> mean + t * direction  of a multimode
/// Gaussian state: direction^T cov^{-1} direction.
double displacement_fisher(const GaussianState& state, const Vector& direction);

/// Bound 1/sqrt(I) for estimating a common x displacement of all M modes of the lossy
/// entangled probe (informational comparison with homodyne detection).
double entangled_fisher_bound(int num_nodes, double total_photons, double eta);

}  // namespace cvsense
