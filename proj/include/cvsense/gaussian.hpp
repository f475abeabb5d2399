#pragma once

// Gaussian-state engine in the xxpp ordering with vacuum quadrature variance 1/4.
//
// A state of M modes carries a mean vector (x_1..x_M, p_1..p_M) and a 2M x 2M
// covariance matrix. Quadratures are x = Re(a), p = Im(a), so a coherent state
// |alpha> has mean (Re alpha, Im alpha) and covariance I/4, and the mean photon
// number of a mode is <x^2> + <p^2> - 1/2.

#include <Eigen/Core>
#include <Eigen/Dense>

#include <complex>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"

namespace cvsense {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

enum class Quadrature { x, p };

inline constexpr double kVacuumVariance = 0.25;

/// Omega = [[0, I_M], [-I_M, 0]].
Matrix symplectic_form(int num_modes);

class GaussianState {
public:
    /// Validates symmetry and the uncertainty relation cov + (i/4) Omega >= 0.
    GaussianState(Vector mean, Matrix cov);

    int num_modes() const noexcept { return static_cast<int>(mean_.size() / 2); }
    const Vector& mean() const noexcept { return mean_; }
    const Matrix& cov() const noexcept { return cov_; }

    /// Mean of the x (or p) block, length M.
    Vector quadrature_mean(Quadrature q) const;
    /// Covariance of the x (or p) block, M x M.
    Matrix quadrature_cov(Quadrature q) const;

    /// Marginal state on the listed modes, in the listed order.
    GaussianState reduced(std::span<const int> modes) const;

    /// Sum over modes of <x^2> + <p^2> - 1/2.
    double mean_photon_number() const;

    /// Smallest eigenvalue of cov + (i/4) Omega; >= 0 for physical states.
    double uncertainty_margin() const;

private:
    Vector mean_;
    Matrix cov_;
};

/// Linear phase-space map  mean -> S mean + d,  cov -> S cov S^T.
class SymplecticTransform {
public:
    /// Rejects S with max|S Omega S^T - Omega| >= 1e-10.
    explicit SymplecticTransform(Matrix matrix);
    SymplecticTransform(Matrix matrix, Vector displacement);

    int num_modes() const noexcept { return static_cast<int>(matrix_.rows() / 2); }
    const Matrix& matrix() const noexcept { return matrix_; }
    const Vector& displacement() const noexcept { return displacement_; }

    /// max|S Omega S^T - Omega|.
    double symplectic_defect() const;

private:
    Matrix matrix_;
    Vector displacement_;
};

/// Per-mode pure-loss channels; each transmissivity in (0, 1].
class LossChannel {
public:
    explicit LossChannel(std::vector<double> transmissivities);
    static LossChannel uniform(int num_modes, double eta);

    int num_modes() const noexcept { return static_cast<int>(etas_.size()); }
    const std::vector<double>& transmissivities() const noexcept { return etas_; }

private:
    std::vector<double> etas_;
};

/// Squeeze parameter r with sinh^2 r = photons, so Var = exp(-2r)/4 in the squeezed quadrature.
double squeeze_parameter(double photons);

/// exp(2r) = (sqrt(N+1) + sqrt(N))^2 for a squeezed vacuum of N photons.
double squeeze_gain(double photons);

GaussianState vacuum_state(int num_modes);
GaussianState coherent_state(double x, double p);

/// Single-mode squeezed vacuum with `photons` mean photons; `squeezed` picks the quiet quadrature.
GaussianState squeezed_vacuum(double photons, Quadrature squeezed = Quadrature::x);

/// Joint state a (x) b; modes of a come first.
GaussianState tensor_product(const GaussianState& a, const GaussianState& b);

/// Real orthogonal matrix whose first row is `first_row` normalised. Remaining rows come
/// from Gram-Schmidt over the standard basis in index order, skipping candidates whose
/// residual norm is below 1e-8.
Matrix orthogonal_completion(const Vector& first_row);

/// Symplectic image of a passive mode transform a -> U a with U unitary (U = X + iY):
/// [[X, -Y], [Y, X]].
SymplecticTransform passive_transform(const ComplexMatrix& unitary);
SymplecticTransform passive_transform(const Matrix& orthogonal);

/// Lossless balanced M x M splitter. With O = orthogonal_completion(1, ..., 1) the input
/// modes b map to outputs a = O^T b, so b_1 = sum_m a_m / sqrt(M).
SymplecticTransform balanced_splitter(int num_modes);

/// As balanced_splitter with O = orthogonal_completion(coeffs): b_1 = sum_m c_m a_m / |c|.
SymplecticTransform unbalanced_splitter(const Vector& coeffs);

GaussianState apply_symplectic(const GaussianState& state, const SymplecticTransform& t);
GaussianState apply_loss(const GaussianState& state, const LossChannel& channel);

/// Adds alpha to every x mean.
GaussianState displace_all(const GaussianState& state, double alpha);

/// Adds `shift` (length 2M) to the mean.
GaussianState displace(const GaussianState& state, const Vector& shift);

/// Draws joint homodyne outcomes of one quadrature on every mode. The covariance block
/// is factored once at construction so campaigns can reuse it.
class HomodyneSampler {
public:
    HomodyneSampler(const GaussianState& state, Quadrature q);

    int size() const noexcept { return static_cast<int>(mean_.size()); }
    const Vector& mean() const noexcept { return mean_; }
    /// L with L L^T equal to the sampled covariance block.
    const Matrix& factor() const noexcept { return factor_; }

    /// Fills `out` (length size()) with one joint sample.
    void sample(Rng& rng, Eigen::Ref<Vector> out) const;
    Vector sample(Rng& rng) const;

private:
    Vector mean_;
    Matrix factor_;
};

Vector homodyne_sample(const GaussianState& state, Quadrature q, Rng& rng);

/// {"num_modes", "mean", "cov" (row-major)}.
nlohmann::json to_json(const GaussianState& state);
GaussianState gaussian_state_from_json(const nlohmann::json& j);

}  // namespace cvsense
