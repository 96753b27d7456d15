#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "ding/denoiser.hpp"
#include "ding/random.hpp"
#include "ding/sample_set.hpp"
#include "ding/schedule.hpp"

namespace ding {

/// Reverse kernel family
///
///   q(x_s | x0, x1) = N(alpha_s x0 + sigma_s sqrt(1 - eta^2) x1, eta^2 sigma_s^2 I).
///
/// eta = 0 gives the deterministic update, eta = 1 drops the noise estimate
/// and redraws all of the noise. For independent x0 ~ p_0, x1 ~ N(0, I) the
/// draw has law p_s because the two noise variances sum to sigma_s^2. Once x0
/// and x1 are replaced by conditional expectations this no longer holds for
/// eta > 0: the redrawn share of the noise does not shrink with the step, and
/// at eta = 1 the terminal covariance of a Gaussian prior ends near half the
/// prior's.
class BridgeKernel {
public:
    explicit BridgeKernel(double eta);

    double eta() const { return eta_; }
    /// eta * sigma_s
    double noise_std(double sigma_s) const { return eta_ * sigma_s; }
    /// sigma_s * sqrt(1 - eta^2)
    double predictor_coefficient(double sigma_s) const { return sigma_s * keep_; }

private:
    double eta_;
    double keep_;
};

struct TransitionParams {
    Eigen::VectorXd mean;
    double std = 0.0;
};

/// Transition from explicit clean/noise estimates at the target time s.
TransitionParams transition_from_estimates(const BridgeKernel& kernel, const Schedule& schedule,
                                           const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
                                           double s);

/// mean = alpha_s x0(x_t, t) + beta_s x1(x_t, t), std = eta sigma_s.
/// Requires 0 <= s < t <= 1 (ErrorKind::Ordering otherwise).
TransitionParams transition_params(const BridgeKernel& kernel, const Denoiser& denoiser,
                                   const Eigen::VectorXd& x_t, double s, double t);

/// mean + std * eps. Always consumes dim() normals from the stream, also when
/// std = 0, so that chains with different methods stay aligned draw for draw.
Eigen::VectorXd sample_transition(const TransitionParams& params, RandomStream& rng);

void check_step_order(double s, double t);

/// Unconditional chain from x_1 ~ N(0, I) down to t = 0. Chain j draws from
/// derive_stream(seed, stream_label, j).
SampleSet run_unconditional(const Denoiser& denoiser, const TimeGrid& grid,
                            const BridgeKernel& kernel, std::uint64_t seed, std::size_t n_chains,
                            std::string_view stream_label = "unconditional");

/// Single chain from a given x_1; used for determinism checks.
Eigen::VectorXd run_unconditional_chain(const Denoiser& denoiser, const TimeGrid& grid,
                                        const BridgeKernel& kernel, Eigen::VectorXd x,
                                        RandomStream& rng);

}  // namespace ding
