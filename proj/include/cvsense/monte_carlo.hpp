#pragma once

// Trial kernels shared by the displacement and phase campaigns.
//
// Trials are grouped in fixed blocks of kTrialBlock. Block b draws from its own generator
// seeded by (seed, b), so results do not depend on thread count or schedule. The serial
// and OpenMP loops run the same block body and reduce block partials in index order.

#include <cstdint>
#include <vector>

#include "cvsense/execution.hpp"
#include "cvsense/gaussian.hpp"

namespace cvsense {

inline constexpr std::int64_t kTrialBlock = 8192;

/// Generator for block `block` of a campaign seeded with `seed`.
Rng block_rng(std::uint64_t seed, std::uint64_t block);

struct TrialMoments {
    std::int64_t trials = 0;
    double sum = 0.0;         // sum of estimates
    double sum_sq_err = 0.0;  // sum of (estimate - truth)^2

    double mean() const { return sum / static_cast<double>(trials); }
    double rms_error() const;
    void merge(const TrialMoments& other);
};

/// Estimator  coeffs . sample - offset  evaluated on `trials` joint homodyne samples.
struct LinearEstimatorKernel {
    const HomodyneSampler& sampler;
    Vector coeffs;
    double offset = 0.0;
    double truth = 0.0;

    /// Moments of one block of `count` trials.
    TrialMoments run_block(std::uint64_t seed, std::uint64_t block, std::int64_t count) const;

    /// Per-block partial moments, in block order.
    std::vector<TrialMoments> run_blocks(std::int64_t trials, std::uint64_t seed, Execution exec) const;

    TrialMoments run(std::int64_t trials, std::uint64_t seed, Execution exec) const;
};

}  // namespace cvsense
