#include "cvsense/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvsense/allocation.hpp"
#include "cvsense/error.hpp"
#include "cvsense/protocols.hpp"

namespace cvsense {

namespace {

constexpr double kPurityClamp = 1e-12;
constexpr double kMinStep = 1e-6;
constexpr double kMaxStep = 1e-1;

void require_eta(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw DomainError("transmissivity must lie in (0, 1], got " + std::to_string(eta));
    }
}

// 4 det V - 1/4 (zero for pure states), clamped at the pure-state branch point.
double mixedness(const Matrix& v) {
    const double x = 4.0 * v.determinant() - 0.25;
    if (x < -kPurityClamp) {
        throw DomainError("covariance below the pure-state determinant");
    }
    return std::abs(x) <= kPurityClamp ? 0.0 : x;
}

}  // namespace

void SqueezedThermalParams::validate() const {
    if (!(r_b >= 0.0) || !std::isfinite(r_b)) throw DomainError("squeeze parameter r_B must be >= 0");
    if (!(n >= 0.0) || !std::isfinite(n)) throw DomainError("thermal occupation n must be >= 0");
    if (!std::isfinite(theta) || !std::isfinite(mean_x) || !std::isfinite(mean_p)) {
        throw DomainError("probe parameters must be finite");
    }
}

Matrix SqueezedThermalParams::covariance() const {
    validate();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix rot(2, 2);
    rot << c, s, -s, c;
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = (2.0 * n + 1.0) * std::exp(-r_b) / 4.0;
    diag(1, 1) = (2.0 * n + 1.0) * std::exp(r_b) / 4.0;
    return rot * diag * rot.transpose();
}

GaussianState SqueezedThermalParams::state() const { return GaussianState(Vector{{mean_x, mean_p}}, covariance()); }

double SqueezedThermalParams::mean_photon_number() const {
    validate();
    return mean_x * mean_x + mean_p * mean_p + (2.0 * n + 1.0) * std::cosh(r_b) / 2.0 - 0.5;
}

double gaussian_log_fidelity(const GaussianState& a, const GaussianState& b) {
    if (a.num_modes() != 1 || b.num_modes() != 1) {
        throw DomainError("closed-form fidelity is single-mode only");
    }
    // Single-mode formula written for covariance sigma = 2V (vacuum I/2):
    //   F = exp(-d^T (V_a + V_b)^{-1} d / 2) / (sqrt(Delta + delta) - sqrt(delta)),
    //   Delta = det(sigma_a + sigma_b), delta = 4 (det sigma_a - 1/4)(det sigma_b - 1/4).
    const Matrix sum = a.cov() + b.cov();
    const double big = 4.0 * sum.determinant();
    const double small = 4.0 * mixedness(a.cov()) * mixedness(b.cov());
    const Vector d = b.mean() - a.mean();
    const double quad = d.dot(sum.ldlt().solve(d));
    // sqrt(Delta + delta) - sqrt(delta) = Delta / (sqrt(Delta + delta) + sqrt(delta))
    return std::log(std::sqrt(big + small) + std::sqrt(small)) - std::log(big) - 0.5 * quad;
}

double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
    return std::exp(gaussian_log_fidelity(a, b));
}

GaussianState lossy_probe(const SqueezedThermalParams& params, double eta, double alpha) {
    require_eta(eta);
    const double root = std::sqrt(eta);
    Vector mean{{root * params.mean_x + alpha, root * params.mean_p}};
    Matrix cov = eta * params.covariance();
    cov.diagonal().array() += (1.0 - eta) * kVacuumVariance;
    return GaussianState(std::move(mean), std::move(cov));
}

FisherEstimate fisher_numeric(const SqueezedThermalParams& params, double eta, const std::vector<double>& steps,
                              double alpha) {
    if (steps.empty()) throw DomainError("fisher_numeric needs at least one step");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i] > kMinStep && steps[i] < kMaxStep)) {
            throw DomainError("finite-difference steps must lie in (1e-6, 1e-1)");
        }
        if (i > 0 && !(steps[i] < steps[i - 1])) {
            throw DomainError("finite-difference steps must be strictly decreasing");
        }
    }
    const GaussianState base = lossy_probe(params, eta, alpha);
    FisherEstimate est;
    for (double eps : steps) {
        const GaussianState shifted = lossy_probe(params, eta, alpha + eps);
        const double one_minus_root = -std::expm1(0.5 * gaussian_log_fidelity(base, shifted));
        est.quotients.push_back(8.0 * one_minus_root / (eps * eps));
    }

    // Neville's scheme in h = eps^2, evaluated at h = 0. diag[k] is the extrapolation
    // through the first k+1 points.
    const std::size_t k = steps.size();
    std::vector<double> table = est.quotients;
    std::vector<double> diag{table[0]};
    for (std::size_t level = 1; level < k; ++level) {
        for (std::size_t i = 0; i + level < k; ++i) {
            const double hi = steps[i] * steps[i];
            const double hj = steps[i + level] * steps[i + level];
            table[i] = (hi * table[i + 1] - hj * table[i]) / (hi - hj);
        }
        diag.push_back(table[0]);
    }
    est.value = diag.back();
    if (diag.size() >= 2) {
        est.extrapolation_error = std::abs(diag.back() - diag[diag.size() - 2]);
    }
    const double noise_floor = 1e-13 * std::abs(est.value);
    for (std::size_t i = 2; i < diag.size(); ++i) {
        const double prev = std::abs(diag[i - 1] - diag[i - 2]);
        const double cur = std::abs(diag[i] - diag[i - 1]);
        if (cur > prev && cur > noise_floor) {
            throw ConvergenceError("Fisher extrapolation is not converging", cur);
        }
    }
    return est;
}

double fisher_closed_form(const SqueezedThermalParams& params, double eta) {
    params.validate();
    require_eta(eta);
    const double er = std::exp(params.r_b);
    const double thermal = 2.0 * params.n + 1.0;
    const double c = std::cos(params.theta);
    const double s = std::sin(params.theta);
    const double numerator = 4.0 * (er * (1.0 - eta) + thermal * eta * (er * er * c * c + s * s));
    const double denominator = (er * (1.0 - eta) + thermal * eta) * (thermal * eta * er + 1.0 - eta);
    return numerator / denominator;
}

FisherMaximum fisher_max(double photons, double eta) {
    require_eta(eta);
    FisherMaximum out;
    const double g = squeezed_noise_factor(photons);
    out.value = 1.0 / (eta * g / 4.0 + (1.0 - eta) / 4.0);
    // arccosh(2N + 1) = 2 arcsinh(sqrt N)
    out.argmax.r_b = 2.0 * std::asinh(std::sqrt(photons));
    return out;
}

double cr_bound_separable(int num_nodes, double total_photons, double eta) {
    if (num_nodes < 1) throw DomainError("number of nodes must be >= 1");
    if (!(total_photons >= 0.0)) throw DomainError("photon number must be >= 0");
    const double per_node = fisher_max(total_photons / num_nodes, eta).value;
    // Fisher information adds over the product probe.
    return 1.0 / std::sqrt(num_nodes * per_node);
}

double displacement_fisher(const GaussianState& state, const Vector& direction) {
    if (direction.size() != state.mean().size()) {
        throw DomainError("direction length must be 2M");
    }
    return direction.dot(state.cov().ldlt().solve(direction));
}

double entangled_fisher_bound(int num_nodes, double total_photons, double eta) {
    const GaussianState probe =
        apply_loss(build_entangled_input(num_nodes, total_photons), LossChannel::uniform(num_nodes, eta));
    Vector direction = Vector::Zero(2 * num_nodes);
    direction.head(num_nodes).setOnes();
    return 1.0 / std::sqrt(displacement_fisher(probe, direction));
}

}  // namespace cvsense
