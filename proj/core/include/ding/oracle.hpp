#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "ding/gmm_prior.hpp"
#include "ding/problem.hpp"
#include "ding/random.hpp"
#include "ding/schedule.hpp"

namespace ding {

/// pi_0(. | y) for a Gaussian-mixture prior and the masked Gaussian likelihood.
///
/// Component k is updated in precision form, Lambda' = Sigma^{-1} + diag(m) /
/// gamma^2, and reweighted by its evidence N(y_obs; mu_obs, Sigma_obs +
/// gamma^2 I). The evidence uses only the observed sub-block, so no singular
/// operator is ever factorized. An empty mask returns the prior unchanged.
GaussianMixture exact_posterior(const InpaintingProblem& problem, const GaussianMixture& prior);

/// log E[l(y | X_0) | X_t = x_t], with the normalizing constant dropped the
/// same way log_likelihood drops it, so the t = 0 value equals
/// log_likelihood(problem, x_t) and an empty mask gives 0.
double exact_intermediate_loglik(const InpaintingProblem& problem, const GaussianMixture& prior,
                                 const Schedule& schedule, const Eigen::VectorXd& x_t, double t);

/// Analytic gradient of exact_intermediate_loglik in x_t. Requires sigma_t > 0.
Eigen::VectorXd exact_guidance_grad(const InpaintingProblem& problem, const GaussianMixture& prior,
                                    const Schedule& schedule, const Eigen::VectorXd& x_t, double t);

/// Central finite differences of exact_intermediate_loglik; verification mode.
Eigen::VectorXd guidance_grad_finite_difference(const InpaintingProblem& problem,
                                                const GaussianMixture& prior,
                                                const Schedule& schedule,
                                                const Eigen::VectorXd& x_t, double t,
                                                double h = 1e-5);

/// E[X_0 | X_t = x_t, Y = y] = x0(x_t, t) + (sigma_t^2 / alpha_t) grad log l_t.
/// alpha_t = 0 throws ErrorKind::Domain.
Eigen::VectorXd exact_posterior_denoiser(const InpaintingProblem& problem,
                                         const GaussianMixture& prior, const Schedule& schedule,
                                         const Eigen::VectorXd& x_t, double t);

/// The same expectation computed directly: each component is conditioned
/// jointly on X_t = x_t and y, and weighted by the joint density of (x_t,
/// y_obs). Shares no code path with the gradient route. Requires
/// 0 < t < 1.
Eigen::VectorXd posterior_denoiser_joint(const InpaintingProblem& problem,
                                         const GaussianMixture& prior, const Schedule& schedule,
                                         const Eigen::VectorXd& x_t, double t);

/// || [x0(z) + (x - z) / alpha_s] - [x0(z) + J(z) (x - z)] || evaluated two ways.
struct DingGap {
    double taylor;   ///< literal difference of the two linearizations, J analytic
    double tweedie;  ///< ||(sigma_s / alpha_s) dx1(z) (x - z)||, dx1 from the score Hessian

    double value() const { return taylor; }
};

/// Distance between the DInG surrogate and the first-order Taylor expansion of
/// the denoiser around z. Requires alpha_s > 0 and sigma_s > 0.
DingGap ding_gap(const GaussianMixture& prior, const Schedule& schedule, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& z, double s);

/// Owns a problem/prior pair together with the cached exact posterior.
class PosteriorOracle {
public:
    PosteriorOracle(InpaintingProblem problem, GaussianMixture prior);

    const InpaintingProblem& problem() const { return problem_; }
    const GaussianMixture& prior() const { return prior_; }
    const GaussianMixture& posterior() const { return posterior_; }

    Eigen::MatrixXd sample(RandomStream& rng, std::size_t n) const {
        return posterior_.sample(rng, n);
    }

private:
    InpaintingProblem problem_;
    GaussianMixture prior_;
    GaussianMixture posterior_;
};

}  // namespace ding
