#include "ding/gmm_prior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "ding/error.hpp"

namespace ding {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

bool all_finite(const Eigen::VectorXd& x) {
    return x.allFinite();
}

bool off_diagonal_zero(const Eigen::MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
    require(!weights_.empty(), ErrorKind::InvalidParameter, "mixture needs at least one component");
    require(means_.size() == weights_.size() && covariances_.size() == weights_.size(),
            ErrorKind::InvalidParameter, "weights, means and covariances must have equal length");
    dim_ = means_.front().size();
    require(dim_ > 0, ErrorKind::InvalidParameter, "mixture dimension must be positive");

    double total = 0.0;
    for (double w : weights_) {
        require(std::isfinite(w) && w > 0.0, ErrorKind::InvalidParameter,
                "mixture weights must be positive");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, ErrorKind::InvalidParameter,
            "mixture weights must sum to 1");

    spectra_.resize(size());
    bases_.resize(size());
    for (std::size_t k = 0; k < size(); ++k) {
        auto& cov = covariances_[k];
        require(means_[k].size() == dim_ && all_finite(means_[k]), ErrorKind::InvalidParameter,
                "component means must be finite vectors of the mixture dimension");
        require(cov.rows() == dim_ && cov.cols() == dim_ && cov.allFinite(),
                ErrorKind::InvalidParameter, "component covariances must be finite d x d matrices");
        require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12, ErrorKind::InvalidParameter,
                "component covariances must be symmetric");
        cov = 0.5 * (cov + cov.transpose()).eval();

        if (off_diagonal_zero(cov)) {
            spectra_[k] = cov.diagonal();
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
            require(solver.info() == Eigen::Success, ErrorKind::Numeric,
                    "eigendecomposition of a component covariance failed");
            spectra_[k] = solver.eigenvalues();
            bases_[k] = solver.eigenvectors();
        }
        require(spectra_[k].minCoeff() > 0.0, ErrorKind::InvalidParameter,
                "component covariances must be positive definite");
    }
}

GaussianMixture GaussianMixture::with_diagonal(std::vector<double> weights,
                                               std::vector<Eigen::VectorXd> means,
                                               std::vector<Eigen::VectorXd> variances) {
    std::vector<Eigen::MatrixXd> covs;
    covs.reserve(variances.size());
    for (const auto& v : variances) {
        covs.emplace_back(v.asDiagonal());
    }
    return GaussianMixture(std::move(weights), std::move(means), std::move(covs));
}

GaussianMixture GaussianMixture::gaussian(const Eigen::VectorXd& mean,
                                          const Eigen::MatrixXd& covariance) {
    return GaussianMixture({1.0}, {mean}, {covariance});
}

Eigen::VectorXd GaussianMixture::to_basis(std::size_t k, const Eigen::VectorXd& v) const {
    if (is_diagonal(k)) {
        return v;
    }
    return bases_[k].transpose() * v;
}

Eigen::VectorXd GaussianMixture::from_basis(std::size_t k, const Eigen::VectorXd& v) const {
    if (is_diagonal(k)) {
        return v;
    }
    return bases_[k] * v;
}

Eigen::MatrixXd GaussianMixture::dense(std::size_t k, const Eigen::VectorXd& values) const {
    if (is_diagonal(k)) {
        return values.asDiagonal();
    }
    return bases_[k] * values.asDiagonal() * bases_[k].transpose();
}

Eigen::VectorXd GaussianMixture::apply(std::size_t k, const Eigen::VectorXd& values,
                                       const Eigen::VectorXd& v) const {
    if (is_diagonal(k)) {
        return values.cwiseProduct(v);
    }
    return bases_[k] * values.cwiseProduct(bases_[k].transpose() * v);
}

Eigen::VectorXd GaussianMixture::mixture_mean() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dim_);
    for (std::size_t k = 0; k < size(); ++k) {
        m += weights_[k] * means_[k];
    }
    return m;
}

Eigen::MatrixXd GaussianMixture::mixture_covariance() const {
    const Eigen::VectorXd m = mixture_mean();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim_, dim_);
    for (std::size_t k = 0; k < size(); ++k) {
        const Eigen::VectorXd dev = means_[k] - m;
        c += weights_[k] * (covariances_[k] + dev * dev.transpose());
    }
    return c;
}

double GaussianMixture::log_density(const Eigen::VectorXd& x) const {
    ScheduleCoefficients identity{1.0, 0.0};
    return gmm_conditional(*this, identity, x).log_marginal;
}

Eigen::VectorXd GaussianMixture::sample(RandomStream& rng) const {
    double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < size() && u >= weights_[k]) {
        u -= weights_[k];
        ++k;
    }
    const Eigen::VectorXd eps = rng.gaussian(dim_);
    return means_[k] + from_basis(k, spectra_[k].cwiseSqrt().cwiseProduct(eps));
}

Eigen::MatrixXd GaussianMixture::sample(RandomStream& rng, std::size_t n) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), dim_);
    for (std::size_t i = 0; i < n; ++i) {
        out.row(static_cast<Eigen::Index>(i)) = sample(rng).transpose();
    }
    return out;
}

GaussianMixture gmm_marginal(const GaussianMixture& prior, const Schedule& schedule, double t) {
    const auto [alpha, sigma] = schedule.at(t);
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    const Eigen::MatrixXd noise =
        sigma * sigma * Eigen::MatrixXd::Identity(prior.dim(), prior.dim());
    for (std::size_t k = 0; k < prior.size(); ++k) {
        means.push_back(alpha * prior.mean(k));
        covs.push_back(alpha * alpha * prior.covariance(k) + noise);
    }
    return GaussianMixture(prior.weights(), std::move(means), std::move(covs));
}

Eigen::VectorXd marginal_spectrum(const GaussianMixture& prior, std::size_t k,
                                  const ScheduleCoefficients& coef) {
    return (coef.alpha * coef.alpha * prior.spectrum(k)).array() + coef.sigma * coef.sigma;
}

Eigen::MatrixXd conditional_gain(const GaussianMixture& prior, std::size_t k,
                                 const ScheduleCoefficients& coef) {
    const Eigen::VectorXd s = marginal_spectrum(prior, k, coef);
    return prior.dense(k, coef.alpha * prior.spectrum(k).cwiseQuotient(s));
}

Eigen::MatrixXd conditional_covariance(const GaussianMixture& prior, std::size_t k,
                                       const ScheduleCoefficients& coef) {
    const Eigen::VectorXd s = marginal_spectrum(prior, k, coef);
    return prior.dense(k, coef.sigma * coef.sigma * prior.spectrum(k).cwiseQuotient(s));
}

Eigen::MatrixXd marginal_precision(const GaussianMixture& prior, std::size_t k,
                                   const ScheduleCoefficients& coef) {
    return prior.dense(k, marginal_spectrum(prior, k, coef).cwiseInverse());
}

MixtureConditional gmm_conditional(const GaussianMixture& prior, const ScheduleCoefficients& coef,
                                   const Eigen::VectorXd& x) {
    require(x.size() == prior.dim(), ErrorKind::Shape, "input dimension does not match the prior");
    require(all_finite(x), ErrorKind::NumericInput, "denoiser input contains non-finite values");

    MixtureConditional out;
    out.coef = coef;
    out.components.reserve(prior.size());
    const double d = static_cast<double>(prior.dim());

    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const Eigen::VectorXd s = marginal_spectrum(prior, k, coef);
        const Eigen::VectorXd z = prior.to_basis(k, x - coef.alpha * prior.mean(k));
        const double quad = z.cwiseAbs2().cwiseQuotient(s).sum();
        const double log_det = s.array().log().sum();

        ComponentConditional c;
        c.log_joint = std::log(prior.weight(k)) - 0.5 * (d * kLog2Pi + log_det + quad);
        c.mean = prior.mean(k) +
                 prior.from_basis(k, coef.alpha * prior.spectrum(k).cwiseQuotient(s).cwiseProduct(z));
        c.score = -prior.from_basis(k, z.cwiseQuotient(s));
        max_log = std::max(max_log, c.log_joint);
        out.components.push_back(std::move(c));
    }

    out.responsibilities.resize(static_cast<Eigen::Index>(prior.size()));
    double total = 0.0;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const double r = std::exp(out.components[k].log_joint - max_log);
        out.responsibilities[static_cast<Eigen::Index>(k)] = r;
        total += r;
    }
    out.responsibilities /= total;
    out.log_marginal = max_log + std::log(total);

    out.mean = Eigen::VectorXd::Zero(prior.dim());
    for (std::size_t k = 0; k < prior.size(); ++k) {
        out.mean += out.responsibilities[static_cast<Eigen::Index>(k)] * out.components[k].mean;
    }
    return out;
}

DenoiseResult gmm_denoise(const GaussianMixture& prior, const Schedule& schedule,
                          const Eigen::VectorXd& x, double t) {
    const ScheduleCoefficients coef = schedule.at(t);
    MixtureConditional cond = gmm_conditional(prior, coef, x);
    if (coef.sigma == 0.0) {
        // X_t = X_0 exactly.
        return {x, std::move(cond.responsibilities)};
    }
    return {std::move(cond.mean), std::move(cond.responsibilities)};
}

Eigen::VectorXd gmm_noise_predict(const GaussianMixture& prior, const Schedule& schedule,
                                  const Eigen::VectorXd& x, double t) {
    const ScheduleCoefficients coef = schedule.at(t);
    if (coef.sigma == 0.0) {
        require(x.size() == prior.dim(), ErrorKind::Shape, "input dimension does not match the prior");
        return Eigen::VectorXd::Zero(prior.dim());
    }
    return noise_from_denoised(coef, x, gmm_denoise(prior, schedule, x, t).x0);
}

Eigen::MatrixXd gmm_denoiser_jacobian(const GaussianMixture& prior, const Schedule& schedule,
                                      const Eigen::VectorXd& x, double t, bool identity_at_zero) {
    const ScheduleCoefficients coef = schedule.at(t);
    if (coef.sigma == 0.0) {
        if (identity_at_zero) {
            return Eigen::MatrixXd::Identity(prior.dim(), prior.dim());
        }
        fail(ErrorKind::Capability, "denoiser Jacobian is not defined at t = 0");
    }
    const MixtureConditional cond = gmm_conditional(prior, coef, x);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(prior.dim(), prior.dim());
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const double r = cond.responsibilities[static_cast<Eigen::Index>(k)];
        const auto& c = cond.components[k];
        jac += r * conditional_gain(prior, k, coef);
        jac += r * (c.mean - cond.mean) * c.score.transpose();
    }
    return jac;
}

Eigen::VectorXd gmm_score(const GaussianMixture& prior, const Schedule& schedule,
                          const Eigen::VectorXd& x, double t) {
    const MixtureConditional cond = gmm_conditional(prior, schedule.at(t), x);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(prior.dim());
    for (std::size_t k = 0; k < prior.size(); ++k) {
        g += cond.responsibilities[static_cast<Eigen::Index>(k)] * cond.components[k].score;
    }
    return g;
}

Eigen::MatrixXd gmm_score_hessian(const GaussianMixture& prior, const Schedule& schedule,
                                  const Eigen::VectorXd& x, double t) {
    const ScheduleCoefficients coef = schedule.at(t);
    const MixtureConditional cond = gmm_conditional(prior, coef, x);
    Eigen::VectorXd mean_score = Eigen::VectorXd::Zero(prior.dim());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(prior.dim(), prior.dim());
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const double r = cond.responsibilities[static_cast<Eigen::Index>(k)];
        const auto& g = cond.components[k].score;
        mean_score += r * g;
        h += r * (g * g.transpose() - marginal_precision(prior, k, coef));
    }
    h -= mean_score * mean_score.transpose();
    return h;
}

Eigen::MatrixXd gmm_noise_predictor_jacobian(const GaussianMixture& prior,
                                             const Schedule& schedule, const Eigen::VectorXd& x,
                                             double t) {
    const ScheduleCoefficients coef = schedule.at(t);
    require(coef.sigma > 0.0, ErrorKind::Domain, "noise-predictor Jacobian needs sigma_t > 0");
    return -coef.sigma * gmm_score_hessian(prior, schedule, x, t);
}

GmmDenoiser::GmmDenoiser(std::shared_ptr<const GaussianMixture> prior, Schedule schedule)
    : prior_(std::move(prior)), schedule_(schedule) {
    require(prior_ != nullptr, ErrorKind::InvalidParameter, "denoiser needs a prior");
}

GmmDenoiser::GmmDenoiser(const GaussianMixture& prior, Schedule schedule)
    : GmmDenoiser(std::make_shared<const GaussianMixture>(prior), schedule) {}

Eigen::VectorXd GmmDenoiser::denoise(const Eigen::VectorXd& x, double t) const {
    return gmm_denoise(*prior_, schedule_, x, t).x0;
}

Eigen::VectorXd GmmDenoiser::noise_predict(const Eigen::VectorXd& x, double t) const {
    return gmm_noise_predict(*prior_, schedule_, x, t);
}

Eigen::MatrixXd GmmDenoiser::jacobian(const Eigen::VectorXd& x, double t) const {
    return gmm_denoiser_jacobian(*prior_, schedule_, x, t);
}

}  // namespace ding
