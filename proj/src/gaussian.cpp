#include "cvsense/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "cvsense/error.hpp"

namespace cvsense {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kUncertaintyTol = 1e-10;
constexpr double kSymplecticTol = 1e-10;
constexpr double kCompletionSkip = 1e-8;
constexpr double kSamplingFloor = 1e-14;

void require_modes(int num_modes) {
    if (num_modes < 1) {
        throw DomainError("number of modes must be >= 1, got " + std::to_string(num_modes));
    }
}

}  // namespace

Matrix symplectic_form(int num_modes) {
    const Eigen::Index m = num_modes;
    Matrix omega = Matrix::Zero(2 * m, 2 * m);
    omega.topRightCorner(m, m) = Matrix::Identity(m, m);
    omega.bottomLeftCorner(m, m) = -Matrix::Identity(m, m);
    return omega;
}

// ---------------------------------------------------------------- GaussianState

GaussianState::GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() == 0 || mean_.size() % 2 != 0) {
        throw DomainError("mean vector must have even, nonzero length");
    }
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw DomainError("covariance must be 2M x 2M matching the mean");
    }
    const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw DomainError("covariance matrix is not symmetric");
    }
    cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
    if (uncertainty_margin() < -kUncertaintyTol * scale) {
        throw DomainError("covariance violates the uncertainty relation cov + (i/4) Omega >= 0");
    }
}

double GaussianState::uncertainty_margin() const {
    const int m = num_modes();
    ComplexMatrix h = cov_.cast<std::complex<double>>();
    h += std::complex<double>(0.0, kVacuumVariance) * symplectic_form(m).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Vector GaussianState::quadrature_mean(Quadrature q) const {
    const Eigen::Index m = num_modes();
    return q == Quadrature::x ? Vector(mean_.head(m)) : Vector(mean_.tail(m));
}

Matrix GaussianState::quadrature_cov(Quadrature q) const {
    const Eigen::Index m = num_modes();
    return q == Quadrature::x ? Matrix(cov_.topLeftCorner(m, m)) : Matrix(cov_.bottomRightCorner(m, m));
}

GaussianState GaussianState::reduced(std::span<const int> modes) const {
    const int m = num_modes();
    const auto k = static_cast<Eigen::Index>(modes.size());
    if (k == 0) {
        throw DomainError("reduced state needs at least one mode");
    }
    std::vector<Eigen::Index> index(2 * k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const int mode = modes[i];
        if (mode < 0 || mode >= m) {
            throw DomainError("mode index out of range: " + std::to_string(mode));
        }
        index[i] = mode;
        index[k + i] = m + mode;
    }
    Vector mean(2 * k);
    Matrix cov(2 * k, 2 * k);
    for (Eigen::Index i = 0; i < 2 * k; ++i) {
        mean(i) = mean_(index[i]);
        for (Eigen::Index j = 0; j < 2 * k; ++j) {
            cov(i, j) = cov_(index[i], index[j]);
        }
    }
    return GaussianState(std::move(mean), std::move(cov));
}

double GaussianState::mean_photon_number() const {
    return cov_.trace() + mean_.squaredNorm() - 0.5 * num_modes();
}

// ---------------------------------------------------------- SymplecticTransform

SymplecticTransform::SymplecticTransform(Matrix matrix)
    : SymplecticTransform(matrix, Vector::Zero(matrix.rows())) {}

SymplecticTransform::SymplecticTransform(Matrix matrix, Vector displacement)
    : matrix_(std::move(matrix)), displacement_(std::move(displacement)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols() || matrix_.rows() % 2 != 0) {
        throw DomainError("symplectic matrix must be square with even dimension");
    }
    if (displacement_.size() != matrix_.rows()) {
        throw DomainError("displacement length must match the symplectic matrix");
    }
    const double defect = symplectic_defect();
    if (!(defect < kSymplecticTol)) {
        throw DomainError("matrix is not symplectic (defect " + std::to_string(defect) + ")");
    }
}

double SymplecticTransform::symplectic_defect() const {
    const Matrix omega = symplectic_form(num_modes());
    return (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------------ LossChannel

LossChannel::LossChannel(std::vector<double> transmissivities) : etas_(std::move(transmissivities)) {
    if (etas_.empty()) {
        throw DomainError("loss channel needs at least one mode");
    }
    for (double eta : etas_) {
        if (!(eta > 0.0 && eta <= 1.0)) {
            throw DomainError("transmissivity must lie in (0, 1], got " + std::to_string(eta));
        }
    }
}

LossChannel LossChannel::uniform(int num_modes, double eta) {
    require_modes(num_modes);
    return LossChannel(std::vector<double>(static_cast<std::size_t>(num_modes), eta));
}

// --------------------------------------------------------------- constructors

double squeeze_parameter(double photons) {
    if (!(photons >= 0.0)) {
        throw DomainError("photon number must be >= 0");
    }
    return std::asinh(std::sqrt(photons));
}

double squeeze_gain(double photons) {
    if (!(photons >= 0.0)) {
        throw DomainError("photon number must be >= 0");
    }
    const double s = std::sqrt(photons + 1.0) + std::sqrt(photons);
    return s * s;
}

GaussianState vacuum_state(int num_modes) {
    require_modes(num_modes);
    const Eigen::Index n = 2 * num_modes;
    return GaussianState(Vector::Zero(n), kVacuumVariance * Matrix::Identity(n, n));
}

GaussianState coherent_state(double x, double p) {
    return GaussianState(Vector{{x, p}}, kVacuumVariance * Matrix::Identity(2, 2));
}

GaussianState squeezed_vacuum(double photons, Quadrature squeezed) {
    const double gain = squeeze_gain(photons);
    const double quiet = kVacuumVariance / gain;
    const double loud = kVacuumVariance * gain;
    Matrix cov = Matrix::Zero(2, 2);
    cov(0, 0) = squeezed == Quadrature::x ? quiet : loud;
    cov(1, 1) = squeezed == Quadrature::x ? loud : quiet;
    return GaussianState(Vector::Zero(2), std::move(cov));
}

GaussianState tensor_product(const GaussianState& a, const GaussianState& b) {
    const Eigen::Index ma = a.num_modes();
    const Eigen::Index mb = b.num_modes();
    const Eigen::Index m = ma + mb;
    // Position of each input quadrature in the joint xxpp vector.
    std::vector<Eigen::Index> pa(2 * ma), pb(2 * mb);
    for (Eigen::Index i = 0; i < ma; ++i) {
        pa[i] = i;
        pa[ma + i] = m + i;
    }
    for (Eigen::Index i = 0; i < mb; ++i) {
        pb[i] = ma + i;
        pb[mb + i] = m + ma + i;
    }
    Vector mean = Vector::Zero(2 * m);
    Matrix cov = Matrix::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < 2 * ma; ++i) {
        mean(pa[i]) = a.mean()(i);
        for (Eigen::Index j = 0; j < 2 * ma; ++j) cov(pa[i], pa[j]) = a.cov()(i, j);
    }
    for (Eigen::Index i = 0; i < 2 * mb; ++i) {
        mean(pb[i]) = b.mean()(i);
        for (Eigen::Index j = 0; j < 2 * mb; ++j) cov(pb[i], pb[j]) = b.cov()(i, j);
    }
    return GaussianState(std::move(mean), std::move(cov));
}

// ------------------------------------------------------------------ splitters

Matrix orthogonal_completion(const Vector& first_row) {
    const Eigen::Index m = first_row.size();
    if (m == 0) {
        throw DomainError("splitter coefficients must be non-empty");
    }
    const double norm = first_row.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DomainError("splitter coefficients must be a nonzero finite vector");
    }
    Matrix rows(m, m);
    rows.row(0) = first_row.transpose() / norm;
    Eigen::Index filled = 1;
    for (Eigen::Index k = 0; k < m && filled < m; ++k) {
        Vector v = Vector::Unit(m, k);
        // Two passes of modified Gram-Schmidt keep the basis orthonormal to rounding.
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index r = 0; r < filled; ++r) {
                v -= rows.row(r).dot(v) * rows.row(r).transpose();
            }
        }
        const double vn = v.norm();
        if (vn < kCompletionSkip) continue;
        rows.row(filled++) = v.transpose() / vn;
    }
    if (filled != m) {
        throw NumericalError("orthogonal completion failed to span the mode space");
    }
    return rows;
}

SymplecticTransform passive_transform(const ComplexMatrix& unitary) {
    const Eigen::Index m = unitary.rows();
    if (m == 0 || unitary.cols() != m) {
        throw DomainError("passive transform needs a square mode matrix");
    }
    const Matrix re = unitary.real();
    const Matrix im = unitary.imag();
    Matrix s(2 * m, 2 * m);
    s.topLeftCorner(m, m) = re;
    s.topRightCorner(m, m) = -im;
    s.bottomLeftCorner(m, m) = im;
    s.bottomRightCorner(m, m) = re;
    return SymplecticTransform(std::move(s));
}

SymplecticTransform passive_transform(const Matrix& orthogonal) {
    return passive_transform(ComplexMatrix(orthogonal.cast<std::complex<double>>()));
}

SymplecticTransform balanced_splitter(int num_modes) {
    require_modes(num_modes);
    return passive_transform(Matrix(orthogonal_completion(Vector::Ones(num_modes)).transpose()));
}

SymplecticTransform unbalanced_splitter(const Vector& coeffs) {
    return passive_transform(Matrix(orthogonal_completion(coeffs).transpose()));
}

// ------------------------------------------------------------------- channels

GaussianState apply_symplectic(const GaussianState& state, const SymplecticTransform& t) {
    if (t.num_modes() != state.num_modes()) {
        throw DomainError("transform acts on " + std::to_string(t.num_modes()) + " modes, state has " +
                          std::to_string(state.num_modes()));
    }
    const Matrix& s = t.matrix();
    return GaussianState(s * state.mean() + t.displacement(), s * state.cov() * s.transpose());
}

GaussianState apply_loss(const GaussianState& state, const LossChannel& channel) {
    const Eigen::Index m = state.num_modes();
    if (channel.num_modes() != m) {
        throw DomainError("loss channel length does not match the number of modes");
    }
    Vector d(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        d(i) = d(m + i) = std::sqrt(channel.transmissivities()[static_cast<std::size_t>(i)]);
    }
    Matrix cov = d.asDiagonal() * state.cov() * d.asDiagonal();
    cov.diagonal() += kVacuumVariance * (Vector::Ones(2 * m) - d.cwiseAbs2());
    return GaussianState(d.cwiseProduct(state.mean()), std::move(cov));
}

GaussianState displace_all(const GaussianState& state, double alpha) {
    Vector mean = state.mean();
    mean.head(state.num_modes()).array() += alpha;
    return GaussianState(std::move(mean), state.cov());
}

GaussianState displace(const GaussianState& state, const Vector& shift) {
    if (shift.size() != state.mean().size()) {
        throw DomainError("displacement length must be 2M");
    }
    return GaussianState(state.mean() + shift, state.cov());
}

// ------------------------------------------------------------------- sampling

HomodyneSampler::HomodyneSampler(const GaussianState& state, Quadrature q)
    : mean_(state.quadrature_mean(q)) {
    const Matrix block = state.quadrature_cov(q);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
    Vector lambda = solver.eigenvalues();
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if (lambda.minCoeff() < -kSamplingFloor * scale) {
        throw NumericalError("homodyne covariance block is not positive semidefinite");
    }
    lambda = lambda.cwiseMax(0.0).cwiseSqrt();
    factor_ = solver.eigenvectors() * lambda.asDiagonal();
}

void HomodyneSampler::sample(Rng& rng, Eigen::Ref<Vector> out) const {
    std::normal_distribution<double> normal;
    Vector z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    out.noalias() = mean_ + factor_ * z;
}

Vector HomodyneSampler::sample(Rng& rng) const {
    Vector out(mean_.size());
    sample(rng, out);
    return out;
}

Vector homodyne_sample(const GaussianState& state, Quadrature q, Rng& rng) {
    return HomodyneSampler(state, q).sample(rng);
}

// ----------------------------------------------------------------------- json

nlohmann::json to_json(const GaussianState& state) {
    nlohmann::json j;
    j["num_modes"] = state.num_modes();
    j["mean"] = std::vector<double>(state.mean().data(), state.mean().data() + state.mean().size());
    std::vector<double> cov;
    cov.reserve(static_cast<std::size_t>(state.cov().size()));
    for (Eigen::Index r = 0; r < state.cov().rows(); ++r) {
        for (Eigen::Index c = 0; c < state.cov().cols(); ++c) cov.push_back(state.cov()(r, c));
    }
    j["cov"] = std::move(cov);
    return j;
}

GaussianState gaussian_state_from_json(const nlohmann::json& j) {
    const int m = j.at("num_modes").get<int>();
    require_modes(m);
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto cov = j.at("cov").get<std::vector<double>>();
    const auto n = static_cast<std::size_t>(2 * m);
    if (mean.size() != n || cov.size() != n * n) {
        throw DomainError("state JSON arrays do not match num_modes");
    }
    Vector mv = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(n));
    Matrix cm = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        cov.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    return GaussianState(std::move(mv), std::move(cm));
}

}  // namespace cvsense
