#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "ding/gmm_prior.hpp"
#include "ding/problem.hpp"
#include "ding/random.hpp"

namespace ding::bench {

/// k components in R^d, full or diagonal covariances.
inline std::shared_ptr<const GaussianMixture> make_prior(Eigen::Index d, std::size_t k,
                                                        bool diagonal, std::uint64_t seed = 1) {
    RandomStream rng(seed);
    std::vector<double> w(k, 1.0 / static_cast<double>(k));
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (std::size_t j = 0; j < k; ++j) {
        means.push_back(2.0 * rng.gaussian(d));
        if (diagonal) {
            covs.emplace_back((0.5 + rng.gaussian(d).array().abs()).matrix().asDiagonal());
        } else {
            Eigen::MatrixXd a(d, d);
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                a.data()[i] = rng.gaussian();
            }
            covs.push_back(a * a.transpose() / static_cast<double>(d) +
                           0.1 * Eigen::MatrixXd::Identity(d, d));
        }
    }
    return std::make_shared<const GaussianMixture>(std::move(w), std::move(means), std::move(covs));
}

inline InpaintingProblem make_problem(const GaussianMixture& prior, double gamma = 0.1) {
    RandomStream rng(2);
    return make_observation(prior.sample(rng), MaskOperator::prefix(prior.dim(), prior.dim() / 2),
                            gamma, rng);
}

}  // namespace ding::bench
