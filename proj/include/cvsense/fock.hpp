#pragma once

// Truncated number-basis representation of single-mode Gaussian states.
// Brute-force reference for fidelities and photon statistics.

#include <complex>

#include "cvsense/gaussian.hpp"

namespace cvsense {

class FockOperator {
public:
    FockOperator(int cutoff, ComplexMatrix matrix);

    int cutoff() const noexcept { return cutoff_; }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }

    double trace() const;
    /// 1 - Tr(rho): probability mass beyond the cutoff.
    double truncation_leakage() const { return 1.0 - trace(); }
    /// Diagonal of the matrix, P(n) for n < cutoff.
    Vector photon_distribution() const;
    double mean_photon_number() const;

private:
    int cutoff_;
    ComplexMatrix matrix_;
};

inline constexpr int kDefaultFockCutoff = 60;
inline constexpr double kMaxTraceDeficit = 1e-8;

/// Density matrix of a single-mode Gaussian state in the number basis, built as
/// a recurrence on the Husimi-function expansion, truncated to `cutoff`.
/// Throws NumericalError when more than 1e-8 of the trace falls beyond the cutoff.
FockOperator gaussian_to_fock(const GaussianState& state, int cutoff = kDefaultFockCutoff);

/// Smallest cutoff (a multiple of `step`, at least `minimum`) whose truncation leakage is
/// below `leakage`.
int required_fock_cutoff(const GaussianState& state, double leakage, int minimum = kDefaultFockCutoff,
                         int step = 20, int maximum = 600);

/// Uhlmann fidelity [Tr sqrt(sqrt(a) b sqrt(a))]^2: square roots by Hermitian
/// eigendecomposition, then the trace norm of sqrt(b) sqrt(a) by SVD.
/// Eigenvalues below -1e-10 are errors; smaller negatives clamp to zero.
double fock_fidelity(const FockOperator& a, const FockOperator& b);

/// Truncated annihilation operator on `cutoff` levels.
ComplexMatrix annihilation(int cutoff);

/// exp(beta a^dag - conj(beta) a) on `cutoff` levels.
ComplexMatrix displacement_operator(int cutoff, std::complex<double> beta);

/// exp((conj(zeta) a^2 - zeta a^dag^2) / 2) on `cutoff` levels.
ComplexMatrix squeeze_operator(int cutoff, std::complex<double> zeta);

/// U rho U^dag for U = displacement_operator(cutoff, beta).
FockOperator displace(const FockOperator& rho, std::complex<double> beta);

}  // namespace cvsense
