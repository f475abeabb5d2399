#include "cvsense/fock.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cvsense/error.hpp"

namespace cvsense {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kNegativeEigenTol = 1e-10;

using Complex = std::complex<double>;

// Number-basis matrix elements from the Husimi function. With x = conj(alpha), y = beta,
//   <alpha|rho|beta> exp((|alpha|^2 + |beta|^2)/2) = C exp(z^T A z / 2 + b^T z),  z = (x, y),
// and the Taylor coefficients of the right side are rho_mn / sqrt(m! n!). On y = conj(x) the
// left side is exp(|alpha|^2) pi Q(alpha), Q Gaussian with covariance cov + I/4, which fixes
// C, A and b. Differentiating gives a two-term recurrence in m and n.
ComplexMatrix build_density(const GaussianState& state, int cutoff) {
    if (state.num_modes() != 1) {
        throw DomainError("Fock representation is single-mode only");
    }
    if (cutoff < 2) {
        throw DomainError("Fock cutoff must be >= 2");
    }
    Matrix sigma = state.cov();
    sigma.diagonal().array() += kVacuumVariance;
    const Matrix sigma_inv = sigma.inverse();
    const Vector& mu = state.mean();

    // (Re alpha, Im alpha) = T z
    Eigen::Matrix2cd t;
    t << 0.5, 0.5, Complex(0.0, 0.5), Complex(0.0, -0.5);
    Eigen::Matrix2cd a = -t.transpose() * sigma_inv.cast<Complex>() * t;
    a(0, 1) += 1.0;
    a(1, 0) += 1.0;
    const Eigen::Vector2cd b = t.transpose() * (sigma_inv * mu).cast<Complex>();
    const double c = std::exp(-0.5 * mu.dot(sigma_inv * mu)) / (2.0 * std::sqrt(sigma.determinant()));

    ComplexMatrix rho = ComplexMatrix::Zero(cutoff, cutoff);
    rho(0, 0) = c;
    for (int m = 0; m < cutoff; ++m) {
        if (m > 0) {
            // rho_{m,0} from row m-1
            const int k = m - 1;
            Complex v = b(0) * rho(k, 0);
            if (k > 0) v += a(0, 0) * std::sqrt(static_cast<double>(k)) * rho(k - 1, 0);
            rho(m, 0) = v / std::sqrt(static_cast<double>(m));
        }
        for (int n = 1; n < cutoff; ++n) {
            const int k = n - 1;
            Complex v = b(1) * rho(m, k);
            if (m > 0) v += a(1, 0) * std::sqrt(static_cast<double>(m)) * rho(m - 1, k);
            if (k > 0) v += a(1, 1) * std::sqrt(static_cast<double>(k)) * rho(m, k - 1);
            rho(m, n) = v / std::sqrt(static_cast<double>(n));
        }
    }
    return rho;
}

void check_density(const FockOperator& op, const char* name) {
    const ComplexMatrix& m = op.matrix();
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
        throw NumericalError(std::string(name) + " is not Hermitian");
    }
}

// Eigenvalues below machine epsilon times the largest one are eigensolver rounding noise.
Vector drop_roundoff(const Vector& lambda) {
    const double floor = std::numeric_limits<double>::epsilon() * lambda.cwiseAbs().maxCoeff();
    return lambda.unaryExpr([floor](double x) { return x > floor ? x : 0.0; });
}

// Principal square root of a Hermitian PSD matrix, clamping small negative eigenvalues.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, const char* name) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (m + m.adjoint()));
    const Vector& lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -kNegativeEigenTol) {
        throw NumericalError(std::string(name) + " has eigenvalue " + std::to_string(lambda.minCoeff()));
    }
    const Vector root = drop_roundoff(lambda).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

FockOperator::FockOperator(int cutoff, ComplexMatrix matrix) : cutoff_(cutoff), matrix_(std::move(matrix)) {
    if (cutoff_ < 1 || matrix_.rows() != cutoff_ || matrix_.cols() != cutoff_) {
        throw DomainError("Fock matrix must be cutoff x cutoff");
    }
}

double FockOperator::trace() const { return matrix_.trace().real(); }

Vector FockOperator::photon_distribution() const { return matrix_.diagonal().real(); }

double FockOperator::mean_photon_number() const {
    const Vector p = photon_distribution();
    return p.dot(Vector::LinSpaced(cutoff_, 0.0, cutoff_ - 1.0));
}

ComplexMatrix annihilation(int cutoff) {
    ComplexMatrix a = ComplexMatrix::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ComplexMatrix displacement_operator(int cutoff, std::complex<double> beta) {
    const ComplexMatrix a = annihilation(cutoff);
    const ComplexMatrix generator = beta * a.adjoint() - std::conj(beta) * a;
    return generator.exp();
}

ComplexMatrix squeeze_operator(int cutoff, std::complex<double> zeta) {
    const ComplexMatrix a = annihilation(cutoff);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix generator = 0.5 * (std::conj(zeta) * a2 - zeta * a2.adjoint());
    return generator.exp();
}

FockOperator gaussian_to_fock(const GaussianState& state, int cutoff) {
    FockOperator op(cutoff, build_density(state, cutoff));
    const double deficit = op.truncation_leakage();
    if (deficit > kMaxTraceDeficit) {
        throw NumericalError("Fock cutoff " + std::to_string(cutoff) + " too small: trace deficit " +
                             std::to_string(deficit));
    }
    return op;
}

int required_fock_cutoff(const GaussianState& state, double leakage, int minimum, int step, int maximum) {
    for (int cutoff = minimum; cutoff <= maximum; cutoff += step) {
        const ComplexMatrix rho = build_density(state, cutoff);
        if (1.0 - rho.trace().real() < leakage) return cutoff;
    }
    throw NumericalError("no Fock cutoff up to " + std::to_string(maximum) + " reaches leakage " +
                         std::to_string(leakage));
}

double fock_fidelity(const FockOperator& a, const FockOperator& b) {
    if (a.cutoff() != b.cutoff()) {
        throw DomainError("fidelity needs operators with the same cutoff");
    }
    check_density(a, "first operator");
    check_density(b, "second operator");
    // Tr sqrt(sqrt(a) b sqrt(a)) is the sum of singular values of sqrt(b) sqrt(a). The SVD
    // resolves small singular values to absolute precision, whereas square roots of
    // eigenvalues of the product turn 1e-16 rounding into 1e-8 per level.
    const ComplexMatrix product = psd_sqrt(b.matrix(), "second operator") * psd_sqrt(a.matrix(), "first operator");
    const double trace_root = Eigen::BDCSVD<ComplexMatrix>(product).singularValues().sum();
    return trace_root * trace_root;
}

FockOperator displace(const FockOperator& rho, std::complex<double> beta) {
    const ComplexMatrix u = displacement_operator(rho.cutoff(), beta);
    return FockOperator(rho.cutoff(), u * rho.matrix() * u.adjoint());
}

}  // namespace cvsense
