#include "cvsense/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cvsense/error.hpp"

namespace cvsense {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void configure_threads_from_env() {
    const char* env = std::getenv("CVSENSE_THREADS");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) {
        throw DomainError(std::string("CVSENSE_THREADS must be a positive integer, got '") + env + "'");
    }
#ifdef _OPENMP
    omp_set_num_threads(static_cast<int>(n));
#endif
}

Rng block_rng(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    return Rng(seq);
}

double TrialMoments::rms_error() const { return std::sqrt(sum_sq_err / static_cast<double>(trials)); }

void TrialMoments::merge(const TrialMoments& other) {
    trials += other.trials;
    sum += other.sum;
    sum_sq_err += other.sum_sq_err;
}

TrialMoments LinearEstimatorKernel::run_block(std::uint64_t seed, std::uint64_t block, std::int64_t count) const {
    Rng rng = block_rng(seed, block);
    std::normal_distribution<double> normal;
    const Eigen::Index m = sampler.size();
    const Vector& mean = sampler.mean();
    const Matrix& factor = sampler.factor();
    Vector z(m);
    Vector outcome(m);
    TrialMoments moments;
    moments.trials = count;
    for (std::int64_t t = 0; t < count; ++t) {
        for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(rng);
        outcome.noalias() = mean + factor * z;
        const double estimate = coeffs.dot(outcome) - offset;
        const double err = estimate - truth;
        moments.sum += estimate;
        moments.sum_sq_err += err * err;
    }
    return moments;
}

std::vector<TrialMoments> LinearEstimatorKernel::run_blocks(std::int64_t trials, std::uint64_t seed,
                                                            Execution exec) const {
    if (trials < 1) {
        throw DomainError("trial count must be >= 1");
    }
    if (coeffs.size() != sampler.size()) {
        throw DomainError("estimator coefficients do not match the sampled modes");
    }
    const std::int64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<TrialMoments> partial(static_cast<std::size_t>(blocks));
    auto body = [&](std::int64_t b) {
        const std::int64_t count = std::min(kTrialBlock, trials - b * kTrialBlock);
        partial[static_cast<std::size_t>(b)] = run_block(seed, static_cast<std::uint64_t>(b), count);
    };
    if (exec == Execution::serial) {
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < blocks; ++b) body(b);
    }
    return partial;
}

TrialMoments LinearEstimatorKernel::run(std::int64_t trials, std::uint64_t seed, Execution exec) const {
    TrialMoments total;
    for (const TrialMoments& p : run_blocks(trials, seed, exec)) total.merge(p);
    return total;
}

}  // namespace cvsense
