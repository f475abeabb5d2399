#include <gtest/gtest.h>

#include <cmath>

#include "cvsense/execution.hpp"
#include "cvsense/monte_carlo.hpp"
#include "cvsense/protocols.hpp"

using namespace cvsense;

namespace {

GaussianState lossy_entangled(int m, double n, double eta) {
    return displace_all(apply_loss(build_entangled_input(m, n), LossChannel::uniform(m, eta)), 0.1);
}

}  // namespace

TEST(BlockRng, DependsOnSeedAndBlock) {
    Rng a = block_rng(1, 0), b = block_rng(1, 0), c = block_rng(1, 1), d = block_rng(2, 0);
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
}

TEST(TrialMoments, Merge) {
    TrialMoments a{2, 1.0, 0.5}, b{3, 2.0, 1.0};
    a.merge(b);
    EXPECT_EQ(a.trials, 5);
    EXPECT_DOUBLE_EQ(a.sum, 3.0);
    EXPECT_DOUBLE_EQ(a.rms_error(), std::sqrt(1.5 / 5));
    EXPECT_DOUBLE_EQ(a.mean(), 0.6);
}

TEST(LinearKernel, BlockLayout) {
    const HomodyneSampler sampler(lossy_entangled(3, 2.0, 0.9), Quadrature::x);
    const LinearEstimatorKernel k{sampler, Vector::Constant(3, 1.0 / 3), 0.0, 0.1};
    const auto blocks = k.run_blocks(2 * kTrialBlock + 5, 7, Execution::serial);
    ASSERT_EQ(blocks.size(), 3u);
    EXPECT_EQ(blocks[0].trials, kTrialBlock);
    EXPECT_EQ(blocks[2].trials, 5);
    // A block is a pure function of (seed, block, count).
    const TrialMoments again = k.run_block(7, 1, kTrialBlock);
    EXPECT_EQ(again.sum, blocks[1].sum);
    EXPECT_EQ(again.sum_sq_err, blocks[1].sum_sq_err);
}

TEST(LinearKernel, SerialAndParallelBitIdentical) {
    const HomodyneSampler sampler(lossy_entangled(8, 4.0, 0.8), Quadrature::x);
    const LinearEstimatorKernel k{sampler, Vector::Constant(8, 1.0 / 8), 0.0, 0.1};
    for (std::int64_t trials : {std::int64_t{1}, kTrialBlock, 10 * kTrialBlock + 123}) {
        const TrialMoments s = k.run(trials, 99, Execution::serial);
        const TrialMoments p = k.run(trials, 99, Execution::parallel);
        EXPECT_EQ(s.trials, p.trials);
        EXPECT_EQ(s.sum, p.sum);
        EXPECT_EQ(s.sum_sq_err, p.sum_sq_err);
    }
}

TEST(LinearKernel, OffsetAndTruth) {
    // Coherent vacuum: the estimate is mean-shifted by -offset.
    const HomodyneSampler sampler(coherent_state(0.5, 0.0), Quadrature::x);
    const LinearEstimatorKernel k{sampler, Vector::Ones(1), 0.5, 0.0};
    const TrialMoments t = k.run(400000, 3, Execution::parallel);
    EXPECT_NEAR(t.mean(), 0.0, 5 * 0.5 / std::sqrt(400000.0));
    EXPECT_NEAR(t.rms_error(), 0.5, 5 * 0.5 / std::sqrt(2 * 400000.0));
}

TEST(Protocols, SerialAndParallelReportsAgree) {
    SensorNetworkConfig cfg;
    cfg.num_nodes = 6;
    cfg.total_photons = 3.0;
    cfg.etas = {0.85};
    cfg.alpha = 0.1;
    cfg.trials = 50000;
    cfg.seed = 21;
    for (Scheme s : {Scheme::entangled, Scheme::product}) {
        cfg.scheme = s;
        const EstimatorReport a = simulate_displacement_protocol(cfg, Execution::serial);
        const EstimatorReport b = simulate_displacement_protocol(cfg, Execution::parallel);
        EXPECT_EQ(a.empirical_mean, b.empirical_mean);
        EXPECT_EQ(a.empirical_rms_error, b.empirical_rms_error);
    }
    PhaseNetworkConfig ph;
    ph.num_nodes = 2;
    ph.total_photons = 2.0;
    ph.phase = 0.01;
    ph.trials = 30000;
    EXPECT_EQ(simulate_phase_protocol(ph, Execution::serial).estimator.empirical_rms_error,
              simulate_phase_protocol(ph, Execution::parallel).estimator.empirical_rms_error);
}

TEST(Protocols, SeedChangesResult) {
    SensorNetworkConfig cfg;
    cfg.num_nodes = 2;
    cfg.total_photons = 1.0;
    cfg.trials = 1000;
    cfg.seed = 1;
    const double a = simulate_displacement_protocol(cfg).empirical_mean;
    cfg.seed = 2;
    EXPECT_NE(a, simulate_displacement_protocol(cfg).empirical_mean);
}

TEST(Execution, MaxThreadsPositive) { EXPECT_GE(max_threads(), 1); }
