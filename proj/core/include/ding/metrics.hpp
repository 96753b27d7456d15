#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "ding/gmm_prior.hpp"
#include "ding/problem.hpp"
#include "ding/sample_set.hpp"

namespace ding {

inline constexpr std::size_t kDefaultProjections = 128;

/// Context PSNR in dB over observed coordinates only:
/// 10 log10(peak^2 / MSE_obs). An exact match returns +infinity, never a cap.
double cpsnr(const Eigen::VectorXd& x, const Eigen::VectorXd& x_ref, const MaskOperator& mask,
             double peak);

/// Pools the squared error of every row of `samples` before converting to dB.
double cpsnr(const Eigen::MatrixXd& samples, const Eigen::VectorXd& x_ref,
             const MaskOperator& mask, double peak);

/// Squared 1-D Wasserstein-2 distance between two empirical samples. Both
/// quantile functions are evaluated at the midpoints (i + 1/2) / N of
/// N = max(n_a, n_b) levels with linear interpolation between order
/// statistics; for equal sizes this is the mean squared difference of sorted
/// values.
double wasserstein2_squared_1d(std::span<const double> a, std::span<const double> b);

/// L x d matrix of unit directions, uniform on the sphere, fixed by seed.
Eigen::MatrixXd random_directions(Eigen::Index dim, std::size_t count, std::uint64_t seed);

/// sqrt of the mean squared 1-D W2 over the given projection directions.
double sliced_w2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 const Eigen::MatrixXd& directions);

double sliced_w2(const SampleSet& a, const SampleSet& b, std::size_t projections,
                 std::uint64_t seed);

struct MomentError {
    double mean_error;  ///< ||sample mean - mixture mean||_2
    double cov_error;   ///< ||sample covariance - mixture covariance||_F
};

/// Sample covariance uses the n - 1 normalization; n < 2 is rejected.
MomentError moment_diff(const SampleSet& samples, const GaussianMixture& reference);

}  // namespace ding
