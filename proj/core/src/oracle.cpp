#include "ding/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "ding/error.hpp"

namespace ding {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

using Index = Eigen::Index;

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Index>& idx) {
    Eigen::VectorXd out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out[static_cast<Index>(i)] = v[idx[i]];
    }
    return out;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<Index>& rows,
                       const std::vector<Index>& cols) {
    Eigen::MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
        }
    }
    return out;
}

Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    require(llt.info() == Eigen::Success, ErrorKind::Numeric, what);
    return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

/// log N(r; 0, B) given the factorization of B.
double log_gaussian(const Eigen::VectorXd& r, const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const double quad = r.dot(llt.solve(r));
    return -0.5 * (static_cast<double>(r.size()) * kLog2Pi + log_det(llt) + quad);
}

double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) {
        return m;
    }
    double s = 0.0;
    for (double x : v) {
        s += std::exp(x - m);
    }
    return m + std::log(s);
}

/// Per-component pieces of l_t(y | x): log(r_k L_k) and B_k^{-1} (y_obs - a_k).
struct IntermediateTerms {
    MixtureConditional conditional;
    std::vector<double> log_terms;
    std::vector<Eigen::VectorXd> solved;
};

IntermediateTerms intermediate_terms(const InpaintingProblem& problem,
                                     const GaussianMixture& prior,
                                     const ScheduleCoefficients& coef,
                                     const Eigen::VectorXd& x_t) {
    const std::vector<Index> obs = problem.mask().observed_indices();
    const Eigen::VectorXd y_obs = gather(problem.y(), obs);
    const double gamma2 = problem.gamma() * problem.gamma();
    const double n = static_cast<double>(obs.size());

    IntermediateTerms out{gmm_conditional(prior, coef, x_t), {}, {}};
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const auto& comp = out.conditional.components[k];
        Eigen::MatrixXd b = gather(conditional_covariance(prior, k, coef), obs, obs);
        b.diagonal().array() += gamma2;
        const auto llt = factorize(b, "observed conditional covariance is not positive definite");
        const Eigen::VectorXd r = y_obs - gather(comp.mean, obs);
        const Eigen::VectorXd solved = llt.solve(r);
        // (2 pi gamma^2)^{n/2} N(y; a, B), folded so the large constants cancel.
        const double log_l = -0.5 * (log_det(llt) - n * std::log(gamma2) + r.dot(solved));
        const double log_r = comp.log_joint - out.conditional.log_marginal;
        out.log_terms.push_back(log_r + log_l);
        out.solved.push_back(solved);
    }
    return out;
}

}  // namespace

GaussianMixture exact_posterior(const InpaintingProblem& problem, const GaussianMixture& prior) {
    require(problem.dim() == prior.dim(), ErrorKind::Shape, "problem and prior dimensions differ");
    if (problem.degenerate()) {
        return prior;
    }
    const Index d = prior.dim();
    const std::vector<Index> obs = problem.mask().observed_indices();
    const Eigen::VectorXd y_obs = gather(problem.y(), obs);
    const double gamma2 = problem.gamma() * problem.gamma();
    const Eigen::VectorXd data_precision = problem.mask().as_vector() / gamma2;
    const Eigen::VectorXd data_term = problem.y() / gamma2;  // y is zero off the support

    std::vector<double> log_weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        Eigen::MatrixXd precision = prior.dense(k, prior.spectrum(k).cwiseInverse());
        const Eigen::VectorXd rhs = precision * prior.mean(k) + data_term;
        precision.diagonal() += data_precision;
        const auto llt = factorize(precision, "posterior precision is singular");
        Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(d, d));
        cov = 0.5 * (cov + cov.transpose()).eval();
        means.push_back(llt.solve(rhs));
        covs.push_back(std::move(cov));

        Eigen::MatrixXd evidence_cov = gather(prior.covariance(k), obs, obs);
        evidence_cov.diagonal().array() += gamma2;
        const auto ev = factorize(evidence_cov, "evidence covariance is not positive definite");
        log_weights.push_back(std::log(prior.weight(k)) +
                              log_gaussian(y_obs - gather(prior.mean(k), obs), ev));
    }

    const double norm = log_sum_exp(log_weights);
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> kept_means;
    std::vector<Eigen::MatrixXd> kept_covs;
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        const double w = std::exp(log_weights[k] - norm);
        if (w > 0.0) {  // components whose evidence underflows carry no mass
            weights.push_back(w);
            kept_means.push_back(std::move(means[k]));
            kept_covs.push_back(std::move(covs[k]));
        }
    }
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    for (double& w : weights) {
        w /= total;
    }
    return GaussianMixture(std::move(weights), std::move(kept_means), std::move(kept_covs));
}

double exact_intermediate_loglik(const InpaintingProblem& problem, const GaussianMixture& prior,
                                 const Schedule& schedule, const Eigen::VectorXd& x_t, double t) {
    require(problem.dim() == prior.dim(), ErrorKind::Shape, "problem and prior dimensions differ");
    const ScheduleCoefficients coef = schedule.at(t);
    if (coef.sigma == 0.0) {
        return log_likelihood(problem, x_t);
    }
    if (problem.degenerate()) {
        return 0.0;
    }
    return log_sum_exp(intermediate_terms(problem, prior, coef, x_t).log_terms);
}

Eigen::VectorXd exact_guidance_grad(const InpaintingProblem& problem, const GaussianMixture& prior,
                                    const Schedule& schedule, const Eigen::VectorXd& x_t,
                                    double t) {
    require(problem.dim() == prior.dim(), ErrorKind::Shape, "problem and prior dimensions differ");
    const ScheduleCoefficients coef = schedule.at(t);
    require(coef.sigma > 0.0, ErrorKind::Domain, "guidance gradient needs sigma_t > 0");
    const Index d = prior.dim();
    if (problem.degenerate()) {
        return Eigen::VectorXd::Zero(d);
    }

    const IntermediateTerms terms = intermediate_terms(problem, prior, coef, x_t);
    const double norm = log_sum_exp(terms.log_terms);
    const auto& cond = terms.conditional;
    const std::vector<Index> obs = problem.mask().observed_indices();

    Eigen::VectorXd mean_score = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < prior.size(); ++k) {
        mean_score += cond.responsibilities[static_cast<Index>(k)] * cond.components[k].score;
    }

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const double weight = std::exp(terms.log_terms[k] - norm);
        // d log r_k / dx
        Eigen::VectorXd term = cond.components[k].score - mean_score;
        // d log L_k / dx = A_k^T P^T B_k^{-1} (y_obs - a_k), A_k symmetric
        Eigen::VectorXd scattered = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i < obs.size(); ++i) {
            scattered[obs[i]] = terms.solved[k][static_cast<Index>(i)];
        }
        term += conditional_gain(prior, k, coef) * scattered;
        grad += weight * term;
    }
    return grad;
}

Eigen::VectorXd guidance_grad_finite_difference(const InpaintingProblem& problem,
                                                const GaussianMixture& prior,
                                                const Schedule& schedule,
                                                const Eigen::VectorXd& x_t, double t, double h) {
    Eigen::VectorXd grad(x_t.size());
    for (Index i = 0; i < x_t.size(); ++i) {
        Eigen::VectorXd plus = x_t;
        Eigen::VectorXd minus = x_t;
        plus[i] += h;
        minus[i] -= h;
        grad[i] = (exact_intermediate_loglik(problem, prior, schedule, plus, t) -
                   exact_intermediate_loglik(problem, prior, schedule, minus, t)) /
                  (2.0 * h);
    }
    return grad;
}

Eigen::VectorXd exact_posterior_denoiser(const InpaintingProblem& problem,
                                         const GaussianMixture& prior, const Schedule& schedule,
                                         const Eigen::VectorXd& x_t, double t) {
    const ScheduleCoefficients coef = schedule.at(t);
    require(coef.alpha > 0.0, ErrorKind::Domain, "posterior denoiser needs alpha_t > 0");
    if (coef.sigma == 0.0) {
        return x_t;
    }
    const Eigen::VectorXd x0 = gmm_denoise(prior, schedule, x_t, t).x0;
    return x0 + (coef.sigma * coef.sigma / coef.alpha) *
                    exact_guidance_grad(problem, prior, schedule, x_t, t);
}

Eigen::VectorXd posterior_denoiser_joint(const InpaintingProblem& problem,
                                         const GaussianMixture& prior, const Schedule& schedule,
                                         const Eigen::VectorXd& x_t, double t) {
    require(problem.dim() == prior.dim(), ErrorKind::Shape, "problem and prior dimensions differ");
    const auto [alpha, sigma] = schedule.at(t);
    require(alpha > 0.0 && sigma > 0.0, ErrorKind::Domain,
            "joint conditioning needs alpha_t > 0 and sigma_t > 0");
    const Index d = prior.dim();
    const std::vector<Index> obs = problem.mask().observed_indices();
    const Index n = static_cast<Index>(obs.size());
    const double gamma2 = problem.gamma() * problem.gamma();
    const double sigma2 = sigma * sigma;
    const Eigen::VectorXd y_obs = gather(problem.y(), obs);

    std::vector<Index> all(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
        all[static_cast<std::size_t>(i)] = i;
    }

    std::vector<double> log_weights;
    std::vector<Eigen::VectorXd> means;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const Eigen::MatrixXd& cov = prior.covariance(k);
        const Eigen::VectorXd& mu = prior.mean(k);

        // Joint law of (X_t, Y_obs) under component k.
        Eigen::MatrixXd joint(d + n, d + n);
        joint.topLeftCorner(d, d) = alpha * alpha * cov;
        joint.topLeftCorner(d, d).diagonal().array() += sigma2;
        joint.topRightCorner(d, n) = alpha * gather(cov, all, obs);
        joint.bottomLeftCorner(n, d) = joint.topRightCorner(d, n).transpose();
        joint.bottomRightCorner(n, n) = gather(cov, obs, obs);
        joint.bottomRightCorner(n, n).diagonal().array() += gamma2;
        Eigen::VectorXd residual(d + n);
        residual.head(d) = x_t - alpha * mu;
        residual.tail(n) = y_obs - gather(mu, obs);
        const auto joint_llt = factorize(joint, "joint covariance is not positive definite");
        log_weights.push_back(std::log(prior.weight(k)) + log_gaussian(residual, joint_llt));

        // Posterior of X_0 given both observations, precision form.
        const Eigen::MatrixXd prior_precision =
            cov.llt().solve(Eigen::MatrixXd::Identity(d, d));
        Eigen::MatrixXd precision = prior_precision;
        precision.diagonal().array() += alpha * alpha / sigma2;
        Eigen::VectorXd rhs = prior_precision * mu + (alpha / sigma2) * x_t;
        for (Index i : obs) {
            precision(i, i) += 1.0 / gamma2;
            rhs[i] += problem.y()[i] / gamma2;
        }
        means.push_back(factorize(precision, "joint posterior precision is singular").solve(rhs));
    }

    const double norm = log_sum_exp(log_weights);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < means.size(); ++k) {
        out += std::exp(log_weights[k] - norm) * means[k];
    }
    return out;
}

DingGap ding_gap(const GaussianMixture& prior, const Schedule& schedule, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& z, double s) {
    const auto [alpha, sigma] = schedule.at(s);
    require(alpha > 0.0 && sigma > 0.0, ErrorKind::Domain,
            "ding_gap needs alpha_s > 0 and sigma_s > 0");
    require(x.size() == prior.dim() && z.size() == prior.dim(), ErrorKind::Shape,
            "ding_gap inputs must match the prior dimension");
    const Eigen::VectorXd step = x - z;
    const Eigen::VectorXd x0 = gmm_denoise(prior, schedule, z, s).x0;

    const Eigen::VectorXd surrogate = x0 + step / alpha;
    const Eigen::VectorXd taylor = x0 + gmm_denoiser_jacobian(prior, schedule, z, s) * step;
    const Eigen::MatrixXd noise_jac = gmm_noise_predictor_jacobian(prior, schedule, z, s);
    return {(surrogate - taylor).norm(), ((sigma / alpha) * (noise_jac * step)).norm()};
}

PosteriorOracle::PosteriorOracle(InpaintingProblem problem, GaussianMixture prior)
    : problem_(std::move(problem)),
      prior_(std::move(prior)),
      posterior_(exact_posterior(problem_, prior_)) {}

}  // namespace ding
