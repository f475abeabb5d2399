#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cvsense/error.hpp"
#include "cvsense/gaussian.hpp"
#include "oracles.hpp"

using namespace cvsense;

namespace {

Matrix x_block(const GaussianState& s) { return s.quadrature_cov(Quadrature::x); }

GaussianState random_state(int modes, std::mt19937_64& rng) {
    // Random passive mixing of independently squeezed thermal modes, then a shift.
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GaussianState s = oracle::battery_state(u(rng), u(rng), 3.0 * u(rng), normal(rng), normal(rng));
    for (int m = 1; m < modes; ++m) {
        s = tensor_product(s, oracle::battery_state(u(rng), u(rng), 3.0 * u(rng), normal(rng), normal(rng)));
    }
    Vector row(modes);
    for (int m = 0; m < modes; ++m) row(m) = normal(rng);
    return apply_symplectic(s, passive_transform(orthogonal_completion(row)));
}

}  // namespace

TEST(Vacuum, SingleMode) {
    const GaussianState v = vacuum_state(1);
    EXPECT_EQ(v.mean(), Vector::Zero(2));
    EXPECT_EQ(v.cov(), Matrix::Identity(2, 2) * 0.25);
}

TEST(Vacuum, ThreeModes) {
    const GaussianState v = vacuum_state(3);
    EXPECT_EQ(v.num_modes(), 3);
    EXPECT_EQ(v.cov(), Matrix::Identity(6, 6) * 0.25);
}

TEST(Vacuum, RejectsZeroModes) { EXPECT_THROW(vacuum_state(0), DomainError); }

TEST(Vacuum, LossFixedPoint) {
    const GaussianState v = apply_loss(vacuum_state(1), LossChannel::uniform(1, 0.5));
    EXPECT_EQ(v.cov(), Matrix::Identity(2, 2) * 0.25);
}

TEST(SqueezedVacuum, ZeroPhotonsIsVacuum) {
    EXPECT_NEAR((squeezed_vacuum(0.0).cov() - Matrix::Identity(2, 2) * 0.25).norm(), 0.0, 1e-15);
}

TEST(SqueezedVacuum, TenPhotons) {
    const GaussianState s = squeezed_vacuum(10.0);
    EXPECT_NEAR(s.cov()(0, 0), oracle::kSqueezedCovXX10, 1e-15);
    EXPECT_NEAR(s.cov()(0, 0) * s.cov()(1, 1), 1.0 / 16.0, 1e-15);
    EXPECT_NEAR(s.mean_photon_number(), 10.0, 1e-12);
}

TEST(SqueezedVacuum, OnePhoton) {
    const double r = squeeze_parameter(1.0);
    EXPECT_NEAR(r, std::asinh(1.0), 1e-15);
    EXPECT_NEAR(std::exp(2.0 * r), oracle::kGain1, 1e-13);
    EXPECT_NEAR(squeezed_vacuum(1.0).cov()(0, 0), 0.25 / oracle::kGain1, 1e-16);
}

TEST(SqueezedVacuum, PQuadratureSwapsEntries) {
    const GaussianState x = squeezed_vacuum(3.0, Quadrature::x);
    const GaussianState p = squeezed_vacuum(3.0, Quadrature::p);
    EXPECT_DOUBLE_EQ(x.cov()(0, 0), p.cov()(1, 1));
    EXPECT_DOUBLE_EQ(x.cov()(1, 1), p.cov()(0, 0));
}

TEST(SqueezedVacuum, PhotonNumberMatchesSinhSquared) {
    for (double n : {0.0, 0.3, 1.0, 4.0, 25.0, 1e4}) {
        const double r = squeeze_parameter(n);
        EXPECT_NEAR(squeezed_vacuum(n).mean_photon_number(), std::sinh(r) * std::sinh(r), 1e-9 * (1.0 + n));
    }
}

TEST(SqueezedVacuum, RejectsNegative) { EXPECT_THROW(squeezed_vacuum(-0.1), DomainError); }

TEST(BalancedSplitter, OneModeIsIdentity) {
    EXPECT_NEAR((balanced_splitter(1).matrix() - Matrix::Identity(2, 2)).norm(), 0.0, 1e-15);
}

TEST(BalancedSplitter, TwoModes) {
    const double h = 1.0 / std::sqrt(2.0);
    const Matrix x = balanced_splitter(2).matrix().topLeftCorner(2, 2);
    Matrix expected(2, 2);
    expected << h, h, h, -h;
    EXPECT_NEAR((x - expected).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(BalancedSplitter, FourModeSqueezedInput) {
    const GaussianState out =
        apply_symplectic(tensor_product(squeezed_vacuum(4.0), vacuum_state(3)), balanced_splitter(4));
    const double e = 1.0 / oracle::kGain4;  // exp(-2r)
    const Matrix xx = x_block(out);
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            EXPECT_NEAR(xx(m, n), m == n ? (e + 3.0) / 16.0 : (e - 1.0) / 16.0, 1e-15);
        }
    }
}

TEST(BalancedSplitter, RejectsZeroModes) { EXPECT_THROW(balanced_splitter(0), DomainError); }

TEST(UnbalancedSplitter, EqualCoefficientsMatchBalanced) {
    const Matrix a = unbalanced_splitter(Vector{{3.0, 3.0}}).matrix();
    EXPECT_NEAR((a - balanced_splitter(2).matrix()).norm(), 0.0, 1e-15);
}

TEST(UnbalancedSplitter, UnitVectorFirstRow) {
    const Matrix o = orthogonal_completion(Vector{{1.0, 0.0, 0.0}});
    EXPECT_NEAR((o - Matrix::Identity(3, 3)).norm(), 0.0, 1e-15);
}

TEST(UnbalancedSplitter, EightSixCompletion) {
    const Matrix o = orthogonal_completion(Vector{{0.8, 0.6}});
    EXPECT_NEAR(o(0, 0), 0.8, 1e-15);
    EXPECT_NEAR(o(0, 1), 0.6, 1e-15);
    EXPECT_NEAR(std::abs(o(1, 0)), 0.6, 1e-15);
    EXPECT_NEAR(std::abs(o(1, 1)), 0.8, 1e-15);
    EXPECT_NEAR((o * o.transpose() - Matrix::Identity(2, 2)).norm(), 0.0, 1e-15);
}

TEST(UnbalancedSplitter, CollectiveModeCarriesSqueezing) {
    // b_1 = sum_m c_m a_m / |c| must come back out in the squeezed state.
    const Vector c{{0.5, 0.2, 0.9}};
    const GaussianState out =
        apply_symplectic(tensor_product(squeezed_vacuum(2.0), vacuum_state(2)), unbalanced_splitter(c));
    const Vector u = c / c.norm();
    EXPECT_NEAR(u.dot(x_block(out) * u), squeezed_vacuum(2.0).cov()(0, 0), 1e-15);
}

TEST(UnbalancedSplitter, RejectsZeroVector) { EXPECT_THROW(unbalanced_splitter(Vector::Zero(3)), DomainError); }

TEST(ApplySymplectic, IdentityLeavesStateUnchanged) {
    const GaussianState s = squeezed_vacuum(2.0);
    const GaussianState t = apply_symplectic(s, SymplecticTransform(Matrix::Identity(2, 2)));
    EXPECT_EQ(s.cov(), t.cov());
    EXPECT_EQ(s.mean(), t.mean());
}

TEST(ApplySymplectic, DisplacementMakesCoherentState) {
    const GaussianState s =
        apply_symplectic(vacuum_state(1), SymplecticTransform(Matrix::Identity(2, 2), Vector{{0.7, 0.0}}));
    EXPECT_DOUBLE_EQ(s.mean()(0), 0.7);
    EXPECT_EQ(s.cov(), Matrix::Identity(2, 2) * 0.25);
}

TEST(ApplySymplectic, TwoModeSplitOfSqueezedVacuum) {
    const GaussianState out =
        apply_symplectic(tensor_product(squeezed_vacuum(1.0), vacuum_state(1)), balanced_splitter(2));
    const double e = 1.0 / oracle::kGain1;
    const Matrix xx = x_block(out);
    EXPECT_NEAR(xx(0, 0), (e + 1.0) / 8.0, 1e-15);
    EXPECT_NEAR(xx(1, 1), (e + 1.0) / 8.0, 1e-15);
    EXPECT_NEAR(xx(0, 1), (e - 1.0) / 8.0, 1e-15);
}

TEST(ApplySymplectic, DimensionMismatch) {
    EXPECT_THROW(apply_symplectic(vacuum_state(2), balanced_splitter(3)), DomainError);
}

TEST(SymplecticTransform, RejectsNonSymplectic) {
    EXPECT_THROW(SymplecticTransform(Matrix::Identity(2, 2) * 2.0), DomainError);
}

TEST(Loss, UnitTransmissivityIsIdentity) {
    const GaussianState s = squeezed_vacuum(3.0);
    EXPECT_NEAR((apply_loss(s, LossChannel::uniform(1, 1.0)).cov() - s.cov()).norm(), 0.0, 0.0);
}

TEST(Loss, SqueezedTenPhotons) {
    const GaussianState s = apply_loss(squeezed_vacuum(10.0), LossChannel::uniform(1, 0.9));
    EXPECT_NEAR(s.cov()(0, 0), 0.9 * oracle::kSqueezedCovXX10 + 0.025, 1e-15);
    EXPECT_NEAR(s.cov()(0, 0), 3.0360e-2, 5e-7);
}

TEST(Loss, RejectsBadTransmissivity) {
    EXPECT_THROW(LossChannel({0.0}), DomainError);
    EXPECT_THROW(LossChannel({1.5}), DomainError);
    EXPECT_THROW(apply_loss(vacuum_state(2), LossChannel::uniform(3, 0.5)), DomainError);
}

TEST(Displace, ZeroIsIdentity) {
    const GaussianState s = squeezed_vacuum(1.0);
    EXPECT_EQ(displace_all(s, 0.0).mean(), s.mean());
}

TEST(Displace, TwoModeVacuum) {
    const GaussianState s = displace_all(vacuum_state(2), 0.3);
    EXPECT_EQ(s.mean(), (Vector{{0.3, 0.3, 0.0, 0.0}}));
}

TEST(Displace, LossThenDisplacementOrder) {
    const GaussianState coherent = coherent_state(1.0, 0.0);
    const double eta = 0.64;
    const GaussianState received = displace_all(apply_loss(coherent, LossChannel::uniform(1, eta)), 0.2);
    const GaussianState swapped = apply_loss(displace_all(coherent, 0.2), LossChannel::uniform(1, eta));
    EXPECT_NEAR(received.mean()(0), 0.8 * 1.0 + 0.2, 1e-15);
    EXPECT_GT(std::abs(received.mean()(0) - swapped.mean()(0)), 0.01);
}

TEST(Homodyne, VacuumMeanAndVariance) {
    Rng rng(11);
    const HomodyneSampler sampler(vacuum_state(1), Quadrature::x);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sampler.sample(rng)(0);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    EXPECT_LT(std::abs(mean), 3.0 * 0.5 / 1000.0);
    EXPECT_NEAR(sum_sq / n - mean * mean, 0.25, 0.0025);
}

TEST(Homodyne, EntangledCollectiveVariance) {
    const GaussianState s = apply_symplectic(tensor_product(squeezed_vacuum(4.0), vacuum_state(3)), balanced_splitter(4));
    Rng rng(5);
    const HomodyneSampler sampler(s, Quadrature::x);
    const int n = 400000;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double avg = sampler.sample(rng).mean();
        sum_sq += avg * avg;
    }
    const double expected = 1.0 / (16.0 * oracle::kGain4);
    EXPECT_NEAR(expected, 3.4830056250525756e-3, 1e-17);
    EXPECT_NEAR(sum_sq / n, expected, 5.0 * expected * std::sqrt(2.0 / n));
}

TEST(Homodyne, SeedReproducible) {
    Rng a(99), b(99);
    const GaussianState s = squeezed_vacuum(1.0);
    EXPECT_EQ(homodyne_sample(s, Quadrature::p, a), homodyne_sample(s, Quadrature::p, b));
}

TEST(GaussianState, RejectsUncertaintyViolation) {
    EXPECT_THROW(GaussianState(Vector::Zero(2), Matrix::Identity(2, 2) * 0.2), DomainError);
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.1;
    EXPECT_THROW(GaussianState(Vector::Zero(2), asym), DomainError);
}

TEST(GaussianState, ReducedPicksModes) {
    const GaussianState s = tensor_product(coherent_state(0.1, 0.2), squeezed_vacuum(1.0));
    const std::vector<int> modes{1};
    const GaussianState r = s.reduced(modes);
    EXPECT_NEAR((r.cov() - squeezed_vacuum(1.0).cov()).norm(), 0.0, 1e-15);
}

TEST(GaussianState, JsonRoundTrip) {
    std::mt19937_64 rng(3);
    const GaussianState s = random_state(3, rng);
    const GaussianState t = gaussian_state_from_json(to_json(s));
    EXPECT_EQ(s.mean(), t.mean());
    EXPECT_EQ(s.cov(), t.cov());
    EXPECT_EQ(to_json(s)["num_modes"], 3);
}

// ------------------------------------------------------------------ properties

TEST(GaussianProperties, ConstructedTransformsAreSymplectic) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    for (int m = 1; m <= 12; ++m) {
        EXPECT_LT(balanced_splitter(m).symplectic_defect(), 1e-10) << m;
        Vector c(m);
        for (int i = 0; i < m; ++i) c(i) = normal(rng);
        EXPECT_LT(unbalanced_splitter(c).symplectic_defect(), 1e-10) << m;
    }
}

TEST(GaussianProperties, PassiveTransformsPreservePurity) {
    const GaussianState in = tensor_product(squeezed_vacuum(3.0), vacuum_state(4));
    const GaussianState out = apply_symplectic(in, balanced_splitter(5));
    EXPECT_NEAR(out.cov().determinant() / in.cov().determinant(), 1.0, 1e-10);
    EXPECT_NEAR(squeezed_vacuum(7.0).cov().determinant(), 1.0 / 16.0, 1e-15);
}

TEST(GaussianProperties, LossChannelsCompose) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const GaussianState s = random_state(3, rng);
        const std::vector<double> e1{u(rng), u(rng), u(rng)};
        const std::vector<double> e2{u(rng), u(rng), u(rng)};
        std::vector<double> prod(3);
        for (int i = 0; i < 3; ++i) prod[i] = e1[i] * e2[i];
        const GaussianState twice = apply_loss(apply_loss(s, LossChannel(e1)), LossChannel(e2));
        const GaussianState once = apply_loss(s, LossChannel(prod));
        EXPECT_LT((twice.cov() - once.cov()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((twice.mean() - once.mean()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(GaussianProperties, PhotonBookkeeping) {
    const GaussianState in = tensor_product(squeezed_vacuum(2.5), vacuum_state(5));
    const GaussianState out = apply_symplectic(in, balanced_splitter(6));
    EXPECT_NEAR(out.mean_photon_number(), 2.5, 1e-12);
    EXPECT_NEAR(apply_loss(out, LossChannel::uniform(6, 0.7)).mean_photon_number(), 0.7 * 2.5, 1e-12);
}

TEST(GaussianProperties, RandomStatesSatisfyUncertainty) {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 20; ++i) EXPECT_GE(random_state(1 + i % 4, rng).uncertainty_margin(), -1e-12);
}

TEST(GaussianProperties, SampleCovarianceMatchesBlock) {
    std::mt19937_64 srng(31);
    const GaussianState s = random_state(3, srng);
    const HomodyneSampler sampler(s, Quadrature::x);
    Rng rng(37);
    const int n = 100000;
    Matrix acc = Matrix::Zero(3, 3);
    Vector mean = Vector::Zero(3);
    std::vector<Vector> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) {
        draws.push_back(sampler.sample(rng));
        mean += draws.back();
    }
    mean /= n;
    for (const auto& d : draws) acc += (d - mean) * (d - mean).transpose();
    acc /= n - 1;
    const Matrix target = s.quadrature_cov(Quadrature::x);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // Standard error of a sample covariance entry for Gaussian data.
            const double se = std::sqrt((target(i, i) * target(j, j) + target(i, j) * target(i, j)) / n);
            EXPECT_LT(std::abs(acc(i, j) - target(i, j)), 5.0 * se) << i << "," << j;
        }
    }
}
