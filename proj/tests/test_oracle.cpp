#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "ding/error.hpp"
#include "ding/gmm_prior.hpp"
#include "ding/oracle.hpp"
#include "support/oracles.hpp"

namespace ding {
namespace {

using testing::max_abs;
using testing::random_mask;
using testing::random_mixture;

Eigen::VectorXd scalar(double v) {
    return Eigen::VectorXd::Constant(1, v);
}

InpaintingProblem random_problem(const GaussianMixture& prior, RandomStream& rng, double gamma,
                                 bool at_least_one = true) {
    const MaskOperator mask = random_mask(prior.dim(), rng, at_least_one);
    return make_observation(prior.sample(rng), mask, gamma, rng, true);
}

TEST(ExactPosterior, ScalarConjugacy) {
    const GaussianMixture prior =
        GaussianMixture::gaussian(scalar(0.0), Eigen::MatrixXd::Identity(1, 1));
    const InpaintingProblem p(MaskOperator::all(1, true), scalar(1.0), 1.0);
    const GaussianMixture post = exact_posterior(p, prior);
    ASSERT_EQ(post.size(), 1u);
    EXPECT_NEAR(post.mean(0)[0], 0.5, 1e-15);
    EXPECT_NEAR(post.covariance(0)(0, 0), 0.5, 1e-15);
}

TEST(ExactPosterior, EmptyMaskReturnsPrior) {
    RandomStream rng(1);
    const GaussianMixture prior = random_mixture(3, 3, rng);
    const InpaintingProblem p(MaskOperator::all(3, false), Eigen::VectorXd::Zero(3), 0.1);
    const GaussianMixture post = exact_posterior(p, prior);
    ASSERT_EQ(post.size(), prior.size());
    for (std::size_t k = 0; k < prior.size(); ++k) {
        EXPECT_EQ(post.weight(k), prior.weight(k));
        EXPECT_EQ(post.mean(k), prior.mean(k));
        EXPECT_EQ(post.covariance(k), prior.covariance(k));
    }
}

TEST(ExactPosterior, MatchesKalmanForm) {
    RandomStream rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const GaussianMixture prior = random_mixture(5, 3, rng);
        const InpaintingProblem p = random_problem(prior, rng, 0.05 + rng.uniform());
        const GaussianMixture post = exact_posterior(p, prior);
        const GaussianMixture ref = testing::kalman_posterior(p, prior);
        ASSERT_EQ(post.size(), ref.size());
        double total = 0.0;
        for (std::size_t k = 0; k < post.size(); ++k) {
            total += post.weight(k);
            EXPECT_NEAR(post.weight(k), ref.weight(k), 1e-10);
            EXPECT_LT(max_abs(post.mean(k) - ref.mean(k)), 1e-10);
            EXPECT_LT(max_abs(post.covariance(k) - ref.covariance(k)), 1e-10);
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(post.covariance(k));
            EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(ExactPosterior, SmallGammaPinsObservedCoordinates) {
    RandomStream rng(3);
    const GaussianMixture prior = random_mixture(3, 1, rng);
    const Eigen::VectorXd x_star = prior.sample(rng);
    const InpaintingProblem p =
        make_observation(x_star, MaskOperator::prefix(3, 2), 1e-6, rng);
    const GaussianMixture post = exact_posterior(p, prior);
    EXPECT_NEAR(post.mean(0)[0], x_star[0], 1e-9);
    EXPECT_NEAR(post.mean(0)[1], x_star[1], 1e-9);
}

TEST(ExactPosterior, ExtremeEvidenceStaysNormalized) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    const GaussianMixture prior({0.5, 0.5}, {Eigen::VectorXd::Constant(2, 30.0),
                                             Eigen::VectorXd::Constant(2, -30.0)},
                                {I, I});
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
    y[0] = 29.0;
    const InpaintingProblem p(MaskOperator::prefix(2, 1), y, 0.01);
    const GaussianMixture post = exact_posterior(p, prior);
    double total = 0.0;
    for (double w : post.weights()) {
        total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_TRUE(post.mean(0).allFinite());
}

TEST(IntermediateLoglik, EqualsLikelihoodAtZero) {
    RandomStream rng(4);
    const GaussianMixture prior = random_mixture(3, 2, rng);
    const InpaintingProblem p = random_problem(prior, rng, 0.3);
    for (auto kind : {ScheduleKind::LinearFlow, ScheduleKind::TrigVp}) {
        const Schedule s(kind);
        const Eigen::VectorXd x = rng.gaussian(3);
        EXPECT_EQ(exact_intermediate_loglik(p, prior, s, x, 0.0), log_likelihood(p, x));
        EXPECT_NEAR(exact_intermediate_loglik(p, prior, s, x, 1e-8), log_likelihood(p, x), 1e-6);
    }
}

TEST(IntermediateLoglik, EmptyMaskIsZero) {
    RandomStream rng(5);
    const GaussianMixture prior = random_mixture(3, 2, rng);
    const InpaintingProblem p(MaskOperator::all(3, false), Eigen::VectorXd::Zero(3), 0.2);
    const Schedule s;
    const Eigen::VectorXd x = rng.gaussian(3);
    EXPECT_EQ(exact_intermediate_loglik(p, prior, s, x, 0.5), 0.0);
    EXPECT_EQ(exact_guidance_grad(p, prior, s, x, 0.5), Eigen::VectorXd::Zero(3));
}

TEST(IntermediateLoglik, MatchesMonteCarlo) {
    RandomStream rng(6);
    const GaussianMixture prior = random_mixture(3, 3, rng);
    const InpaintingProblem p = random_problem(prior, rng, 0.8);
    const Schedule s;
    const Eigen::VectorXd x = prior.sample(rng) * 0.5 + 0.5 * rng.gaussian(3);
    RandomStream mc(7);
    const auto est = testing::mc_intermediate_likelihood(p, prior, s, x, 0.5, 200000, mc);
    const double exact = std::exp(exact_intermediate_loglik(p, prior, s, x, 0.5));
    EXPECT_LT(std::abs(exact - est.mean), 4.0 * est.std_error)
        << "exact " << exact << " mc " << est.mean << " se " << est.std_error;
}

TEST(GuidanceGrad, MatchesFiniteDifferences) {
    RandomStream rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const GaussianMixture prior = random_mixture(4, 3, rng);
        const InpaintingProblem p = random_problem(prior, rng, 0.2 + rng.uniform());
        const Schedule s(trial % 2 ? ScheduleKind::TrigVp : ScheduleKind::LinearFlow);
        const double t = 0.1 + 0.8 * rng.uniform();
        const Eigen::VectorXd x = rng.gaussian(4);
        const Eigen::VectorXd g = exact_guidance_grad(p, prior, s, x, t);
        const Eigen::VectorXd fd = testing::fd_gradient(
            [&](const Eigen::VectorXd& v) { return exact_intermediate_loglik(p, prior, s, v, t); },
            x, 1e-5);
        EXPECT_LT((g - fd).norm(), 1e-5 * std::max(1.0, fd.norm()));
        EXPECT_LT(max_abs(g - guidance_grad_finite_difference(p, prior, s, x, t)),
                  1e-5 * std::max(1.0, fd.norm()));
    }
}

TEST(GuidanceGrad, FlatLikelihoodVanishes) {
    RandomStream rng(9);
    const GaussianMixture prior = random_mixture(3, 2, rng);
    // Noise-free y: noisy draws at this gamma would put y near 1e6.
    const InpaintingProblem p =
        make_observation(prior.sample(rng), random_mask(3, rng), 1e6, rng, false);
    const Eigen::VectorXd g =
        exact_guidance_grad(p, prior, Schedule(), rng.gaussian(3), 0.5);
    EXPECT_LT(max_abs(g), 1e-10);
}

TEST(GuidanceGrad, NeedsNoise) {
    RandomStream rng(10);
    const GaussianMixture prior = random_mixture(2, 2, rng);
    const InpaintingProblem p = random_problem(prior, rng, 0.3);
    EXPECT_THROW(exact_guidance_grad(p, prior, Schedule(), rng.gaussian(2), 0.0), Error);
}

TEST(PosteriorDenoiser, RoutesAgree) {
    RandomStream rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.bits() % 7);
        const std::size_t K = 1 + rng.bits() % 4;
        const GaussianMixture prior = random_mixture(d, K, rng);
        const InpaintingProblem p = random_problem(prior, rng, 0.1 + rng.uniform());
        const Schedule s(trial % 2 ? ScheduleKind::TrigVp : ScheduleKind::LinearFlow);
        const double t = 0.05 + 0.9 * rng.uniform();
        const Eigen::VectorXd x = prior.sample(rng) * s.at(t).alpha + s.at(t).sigma * rng.gaussian(d);
        const Eigen::VectorXd a = exact_posterior_denoiser(p, prior, s, x, t);
        const Eigen::VectorXd b = posterior_denoiser_joint(p, prior, s, x, t);
        EXPECT_LT(max_abs(a - b), 1e-8) << "trial " << trial;
    }
}

TEST(PosteriorDenoiser, EmptyMaskIsPriorDenoiser) {
    RandomStream rng(12);
    const GaussianMixture prior = random_mixture(3, 2, rng);
    const InpaintingProblem p(MaskOperator::all(3, false), Eigen::VectorXd::Zero(3), 0.1);
    const Schedule s;
    const Eigen::VectorXd x = rng.gaussian(3);
    EXPECT_EQ(exact_posterior_denoiser(p, prior, s, x, 0.4), gmm_denoise(prior, s, x, 0.4).x0);
}

TEST(PosteriorDenoiser, CollapsesToReferenceWithFullMask) {
    RandomStream rng(13);
    const GaussianMixture prior = random_mixture(3, 2, rng);
    const Eigen::VectorXd x_star = prior.sample(rng);
    const InpaintingProblem p = make_observation(x_star, MaskOperator::all(3, true), 1e-5, rng);
    const Eigen::VectorXd est =
        exact_posterior_denoiser(p, prior, Schedule(), rng.gaussian(3), 0.5);
    EXPECT_LT(max_abs(est - x_star), 1e-6);
}

TEST(PosteriorDenoiser, AlphaZeroIsDomainError) {
    RandomStream rng(14);
    const GaussianMixture prior = random_mixture(2, 2, rng);
    const InpaintingProblem p = random_problem(prior, rng, 0.3);
    try {
        exact_posterior_denoiser(p, prior, Schedule(), rng.gaussian(2), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
}

TEST(DingGap, TwoRoutesAgreeWithFiniteDifferenceOracle) {
    RandomStream rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const GaussianMixture prior = random_mixture(3, 3, rng);
        const Schedule s(trial % 2 ? ScheduleKind::TrigVp : ScheduleKind::LinearFlow);
        const double t = 0.1 + 0.8 * rng.uniform();
        const Eigen::VectorXd z = rng.gaussian(3);
        const Eigen::VectorXd x = z + 0.3 * rng.gaussian(3);
        const DingGap gap = ding_gap(prior, s, x, z, t);
        EXPECT_NEAR(gap.taylor, gap.tweedie, 1e-8);
        const Eigen::MatrixXd J = testing::fd_jacobian(
            [&](const Eigen::VectorXd& v) { return testing::dense_denoise(prior, s, v, t); }, z,
            1e-4);
        const double ref = ((x - z) / s.at(t).alpha - J * (x - z)).norm();
        EXPECT_NEAR(gap.value(), ref, 1e-6);
    }
}

TEST(DingGap, StandardGaussianClosedForm) {
    // For N(0, I) under trig-vp the denoiser is alpha x, so J = alpha I and the
    // gap is ||(1/alpha - alpha)(x - z)|| = (sigma^2 / alpha) ||x - z||.
    const GaussianMixture prior =
        GaussianMixture::gaussian(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
    const Schedule s(ScheduleKind::TrigVp);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    const auto c = s.at(0.5);
    EXPECT_NEAR(ding_gap(prior, s, x, z, 0.5).value(),
                c.sigma * c.sigma / c.alpha * std::sqrt(2.0), 1e-14);
}

TEST(PosteriorOracle, CachesPosterior) {
    RandomStream rng(16);
    const GaussianMixture prior = random_mixture(3, 2, rng);
    const InpaintingProblem p = random_problem(prior, rng, 0.2);
    const PosteriorOracle oracle(p, prior);
    const GaussianMixture direct = exact_posterior(p, prior);
    EXPECT_EQ(oracle.posterior().mean(0), direct.mean(0));
    RandomStream a(1);
    EXPECT_EQ(oracle.sample(a, 5).rows(), 5);
}

}  // namespace
}  // namespace ding
