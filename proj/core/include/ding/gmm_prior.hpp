#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "ding/denoiser.hpp"
#include "ding/random.hpp"
#include "ding/schedule.hpp"

namespace ding {

/// Finite mixture of Gaussians in R^d.
///
/// Each covariance is stored together with its eigendecomposition
/// Sigma_k = U_k diag(lambda_k) U_k^T, computed once at construction. Every
/// noised quantity the samplers need (alpha^2 Sigma_k + sigma^2 I, its inverse,
/// the conditional gain) is diagonal in that basis, so evaluation at any t is a
/// pair of basis changes. Covariances with zero off-diagonal entries skip the
/// basis change entirely.
class GaussianMixture {
public:
    GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                    std::vector<Eigen::MatrixXd> covariances);

    static GaussianMixture with_diagonal(std::vector<double> weights,
                                         std::vector<Eigen::VectorXd> means,
                                         std::vector<Eigen::VectorXd> variances);
    static GaussianMixture gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance);

    Eigen::Index dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }

    double weight(std::size_t k) const { return weights_[k]; }
    const std::vector<double>& weights() const { return weights_; }
    const Eigen::VectorXd& mean(std::size_t k) const { return means_[k]; }
    const Eigen::MatrixXd& covariance(std::size_t k) const { return covariances_[k]; }
    bool is_diagonal(std::size_t k) const { return bases_[k].size() == 0; }

    /// Eigenvalues of Sigma_k.
    const Eigen::VectorXd& spectrum(std::size_t k) const { return spectra_[k]; }

    /// U_k^T v (identity for diagonal components).
    Eigen::VectorXd to_basis(std::size_t k, const Eigen::VectorXd& v) const;
    /// U_k v.
    Eigen::VectorXd from_basis(std::size_t k, const Eigen::VectorXd& v) const;
    /// U_k diag(values) U_k^T as a dense matrix.
    Eigen::MatrixXd dense(std::size_t k, const Eigen::VectorXd& values) const;
    /// U_k diag(values) U_k^T v without forming the matrix.
    Eigen::VectorXd apply(std::size_t k, const Eigen::VectorXd& values,
                          const Eigen::VectorXd& v) const;

    Eigen::VectorXd mixture_mean() const;
    Eigen::MatrixXd mixture_covariance() const;

    double log_density(const Eigen::VectorXd& x) const;

    Eigen::VectorXd sample(RandomStream& rng) const;
    /// n x d, one draw per row.
    Eigen::MatrixXd sample(RandomStream& rng, std::size_t n) const;

private:
    Eigen::Index dim_ = 0;
    std::vector<double> weights_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::MatrixXd> covariances_;
    std::vector<Eigen::VectorXd> spectra_;
    std::vector<Eigen::MatrixXd> bases_;
};

/// Law of X_t = alpha_t X_0 + sigma_t X_1: component k becomes
/// N(alpha_t mu_k, alpha_t^2 Sigma_k + sigma_t^2 I) with unchanged weight.
GaussianMixture gmm_marginal(const GaussianMixture& prior, const Schedule& schedule, double t);

/// Per-component view of X_0 | X_t = x.
struct ComponentConditional {
    double log_joint;        ///< log w_k + log N(x; alpha mu_k, S_k)
    Eigen::VectorXd mean;    ///< mu_k + alpha Sigma_k S_k^{-1} (x - alpha mu_k)
    Eigen::VectorXd score;   ///< -S_k^{-1} (x - alpha mu_k)
};

struct MixtureConditional {
    ScheduleCoefficients coef;
    std::vector<ComponentConditional> components;
    Eigen::VectorXd responsibilities;
    Eigen::VectorXd mean;  ///< x0 estimate, sum_k r_k m_k
    double log_marginal;   ///< log p_t(x)
};

/// Responsibilities are normalized with log-sum-exp, so they stay a valid
/// probability vector when every component density underflows.
MixtureConditional gmm_conditional(const GaussianMixture& prior, const ScheduleCoefficients& coef,
                                   const Eigen::VectorXd& x);

/// Spectrum of S_k = alpha^2 Sigma_k + sigma^2 I in the component basis.
Eigen::VectorXd marginal_spectrum(const GaussianMixture& prior, std::size_t k,
                                  const ScheduleCoefficients& coef);
/// d m_k / d x = alpha Sigma_k S_k^{-1} (symmetric).
Eigen::MatrixXd conditional_gain(const GaussianMixture& prior, std::size_t k,
                                 const ScheduleCoefficients& coef);
/// Cov(X_0 | X_t, component k) = sigma^2 Sigma_k S_k^{-1}.
Eigen::MatrixXd conditional_covariance(const GaussianMixture& prior, std::size_t k,
                                       const ScheduleCoefficients& coef);
/// S_k^{-1}.
Eigen::MatrixXd marginal_precision(const GaussianMixture& prior, std::size_t k,
                                   const ScheduleCoefficients& coef);

struct DenoiseResult {
    Eigen::VectorXd x0;
    Eigen::VectorXd responsibilities;
};

/// E[X_0 | X_t = x]. Returns x itself at t = 0. Non-finite x throws
/// ErrorKind::NumericInput.
DenoiseResult gmm_denoise(const GaussianMixture& prior, const Schedule& schedule,
                          const Eigen::VectorXd& x, double t);

/// E[X_1 | X_t = x]; the zero vector at t = 0.
Eigen::VectorXd gmm_noise_predict(const GaussianMixture& prior, const Schedule& schedule,
                                  const Eigen::VectorXd& x, double t);

/// Analytic d x0 / d x: sum_k r_k A_k + sum_k r_k (m_k - x0) g_k^T.
/// At t = 0 throws ErrorKind::Capability unless identity_at_zero is set.
Eigen::MatrixXd gmm_denoiser_jacobian(const GaussianMixture& prior, const Schedule& schedule,
                                      const Eigen::VectorXd& x, double t,
                                      bool identity_at_zero = false);

/// grad log p_t(x).
Eigen::VectorXd gmm_score(const GaussianMixture& prior, const Schedule& schedule,
                          const Eigen::VectorXd& x, double t);

/// Hessian of log p_t at x: sum_k r_k (g_k g_k^T - S_k^{-1}) - gbar gbar^T.
Eigen::MatrixXd gmm_score_hessian(const GaussianMixture& prior, const Schedule& schedule,
                                  const Eigen::VectorXd& x, double t);

/// d x1 / d x computed as -sigma_t times the score Hessian. This does not go
/// through the denoiser Jacobian, so comparing it with (I - alpha J) / sigma is
/// a genuine check of the second-order Tweedie identity. Requires sigma_t > 0.
Eigen::MatrixXd gmm_noise_predictor_jacobian(const GaussianMixture& prior,
                                             const Schedule& schedule, const Eigen::VectorXd& x,
                                             double t);

/// The exact denoiser of a Gaussian-mixture prior behind the generic interface.
class GmmDenoiser final : public Denoiser {
public:
    GmmDenoiser(std::shared_ptr<const GaussianMixture> prior, Schedule schedule);
    GmmDenoiser(const GaussianMixture& prior, Schedule schedule);

    Eigen::Index dim() const override { return prior_->dim(); }
    const Schedule& schedule() const override { return schedule_; }
    Eigen::VectorXd denoise(const Eigen::VectorXd& x, double t) const override;
    Eigen::VectorXd noise_predict(const Eigen::VectorXd& x, double t) const override;
    bool has_jacobian() const override { return true; }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, double t) const override;

    const GaussianMixture& prior() const { return *prior_; }

private:
    std::shared_ptr<const GaussianMixture> prior_;
    Schedule schedule_;
};

}  // namespace ding
