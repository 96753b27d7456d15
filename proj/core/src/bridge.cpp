#include "ding/bridge.hpp"

#include <cmath>
#include <string>

#include "ding/error.hpp"
#include "ding/parallel.hpp"

namespace ding {

BridgeKernel::BridgeKernel(double eta) : eta_(eta), keep_(0.0) {
    require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0, ErrorKind::InvalidParameter,
            "eta must lie in [0, 1]");
    keep_ = std::sqrt(1.0 - eta * eta);
}

void check_step_order(double s, double t) {
    if (!(s >= 0.0 && s < t && t <= 1.0)) {
        fail(ErrorKind::Ordering, "reverse step needs 0 <= s < t <= 1, got s=" + std::to_string(s) +
                                      ", t=" + std::to_string(t));
    }
}

TransitionParams transition_from_estimates(const BridgeKernel& kernel, const Schedule& schedule,
                                           const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
                                           double s) {
    const auto [alpha_s, sigma_s] = schedule.at(s);
    return {alpha_s * x0 + kernel.predictor_coefficient(sigma_s) * x1, kernel.noise_std(sigma_s)};
}

TransitionParams transition_params(const BridgeKernel& kernel, const Denoiser& denoiser,
                                   const Eigen::VectorXd& x_t, double s, double t) {
    check_step_order(s, t);
    const ScheduleCoefficients coef = denoiser.schedule().at(t);
    const Eigen::VectorXd x0 = denoiser.denoise(x_t, t);
    const Eigen::VectorXd x1 = noise_from_denoised(coef, x_t, x0);
    return transition_from_estimates(kernel, denoiser.schedule(), x0, x1, s);
}

Eigen::VectorXd sample_transition(const TransitionParams& params, RandomStream& rng) {
    const Eigen::VectorXd eps = rng.gaussian(params.mean.size());
    return params.mean + params.std * eps;
}

Eigen::VectorXd run_unconditional_chain(const Denoiser& denoiser, const TimeGrid& grid,
                                        const BridgeKernel& kernel, Eigen::VectorXd x,
                                        RandomStream& rng) {
    for (std::size_t k = grid.steps(); k >= 1; --k) {
        x = sample_transition(transition_params(kernel, denoiser, x, grid[k - 1], grid[k]), rng);
    }
    return x;
}

SampleSet run_unconditional(const Denoiser& denoiser, const TimeGrid& grid,
                            const BridgeKernel& kernel, std::uint64_t seed, std::size_t n_chains,
                            std::string_view stream_label) {
    require(n_chains >= 1, ErrorKind::InvalidParameter, "n_chains must be >= 1");
    SampleSet out;
    out.samples.resize(static_cast<Eigen::Index>(n_chains), denoiser.dim());
    out.provenance = {std::string(stream_label), 0, seed};
    parallel_for(n_chains, [&](std::size_t j) {
        RandomStream rng = derive_stream(seed, stream_label, j);
        Eigen::VectorXd x = rng.gaussian(denoiser.dim());
        out.samples.row(static_cast<Eigen::Index>(j)) =
            run_unconditional_chain(denoiser, grid, kernel, std::move(x), rng).transpose();
    });
    return out;
}

}  // namespace ding
