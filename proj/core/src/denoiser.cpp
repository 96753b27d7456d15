#include "ding/denoiser.hpp"

#include "ding/error.hpp"

namespace ding {

Eigen::VectorXd noise_from_denoised(const ScheduleCoefficients& coef, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& x0) {
    if (coef.sigma == 0.0) {
        return Eigen::VectorXd::Zero(x.size());
    }
    return (x - coef.alpha * x0) / coef.sigma;
}

Eigen::VectorXd Denoiser::noise_predict(const Eigen::VectorXd& x, double t) const {
    return noise_from_denoised(schedule().at(t), x, denoise(x, t));
}

Eigen::MatrixXd Denoiser::jacobian(const Eigen::VectorXd&, double) const {
    fail(ErrorKind::Capability, "this denoiser does not expose a Jacobian");
}

Eigen::VectorXd CountingDenoiser::denoise(const Eigen::VectorXd& x, double t) const {
    ++denoise_calls_;
    return inner_.denoise(x, t);
}

Eigen::VectorXd CountingDenoiser::noise_predict(const Eigen::VectorXd& x, double t) const {
    ++noise_calls_;
    return inner_.noise_predict(x, t);
}

Eigen::MatrixXd CountingDenoiser::jacobian(const Eigen::VectorXd& x, double t) const {
    ++jacobian_calls_;
    return inner_.jacobian(x, t);
}

}  // namespace ding
