#pragma once

#include <atomic>
#include <cstddef>

#include <Eigen/Core>

#include "ding/schedule.hpp"

namespace ding {

/// x1 = (x - alpha x0) / sigma for sigma > 0, and the zero vector at sigma = 0
/// (X_1 is independent of X_0 = x there). Every sampler that rebuilds a noise
/// estimate from a corrected clean estimate goes through this one function, so
/// an uncorrected estimate reproduces noise_predict bit for bit.
Eigen::VectorXd noise_from_denoised(const ScheduleCoefficients& coef, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& x0);

/// Clean estimate E[X_0 | X_t = x] and its Tweedie dual E[X_1 | X_t = x].
///
/// Implementations must be safe to call concurrently from several chains.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual Eigen::Index dim() const = 0;
    virtual const Schedule& schedule() const = 0;

    virtual Eigen::VectorXd denoise(const Eigen::VectorXd& x, double t) const = 0;

    /// Defaults to the duality x1 = (x - alpha x0) / sigma.
    virtual Eigen::VectorXd noise_predict(const Eigen::VectorXd& x, double t) const;

    virtual bool has_jacobian() const { return false; }

    /// d x0 / d x. The base implementation throws ErrorKind::Capability.
    virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, double t) const;
};

/// Forwards to another denoiser and counts calls per capability. Used to
/// prove that a sampler never touches the Jacobian.
class CountingDenoiser final : public Denoiser {
public:
    explicit CountingDenoiser(const Denoiser& inner) : inner_(inner) {}

    Eigen::Index dim() const override { return inner_.dim(); }
    const Schedule& schedule() const override { return inner_.schedule(); }
    Eigen::VectorXd denoise(const Eigen::VectorXd& x, double t) const override;
    Eigen::VectorXd noise_predict(const Eigen::VectorXd& x, double t) const override;
    bool has_jacobian() const override { return inner_.has_jacobian(); }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, double t) const override;

    std::size_t denoise_calls() const { return denoise_calls_.load(); }
    std::size_t noise_calls() const { return noise_calls_.load(); }
    std::size_t jacobian_calls() const { return jacobian_calls_.load(); }

private:
    const Denoiser& inner_;
    mutable std::atomic<std::size_t> denoise_calls_{0};
    mutable std::atomic<std::size_t> noise_calls_{0};
    mutable std::atomic<std::size_t> jacobian_calls_{0};
};

}  // namespace ding
