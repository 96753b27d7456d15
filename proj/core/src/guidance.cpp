#include "ding/guidance.hpp"

#include <cmath>
#include <string>

#include "ding/error.hpp"
#include "ding/parallel.hpp"

namespace ding {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Blended: return "blended";
        case Method::Dps: return "dps";
        case Method::Ding: return "ding";
        case Method::Ddnm: return "ddnm";
        case Method::DiffPir: return "diffpir";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (to_string(m) == name) {
            return m;
        }
    }
    fail(ErrorKind::Config, "unknown method '" + std::string(name) + "'");
}

void SamplerConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0, ErrorKind::InvalidParameter,
            "eta must lie in [0, 1]");
    require(positive(gamma), ErrorKind::InvalidParameter, "gamma must be positive");
    require(positive(dps_scale), ErrorKind::InvalidParameter, "dps_scale must be positive");
    require(positive(diffpir_lambda), ErrorKind::InvalidParameter,
            "diffpir_lambda must be positive");
    require(ding_nz >= 1, ErrorKind::InvalidParameter, "ding_nz must be >= 1");
    require(n_chains >= 1, ErrorKind::InvalidParameter, "n_chains must be >= 1");
}

namespace {

Eigen::VectorXd transition_with(const StepContext& ctx, const Eigen::VectorXd& x_t,
                                const Eigen::VectorXd& x0, double s, double t, RandomStream& rng) {
    const Schedule& schedule = ctx.denoiser.schedule();
    const Eigen::VectorXd x1 = noise_from_denoised(schedule.at(t), x_t, x0);
    return sample_transition(transition_from_estimates(ctx.kernel, schedule, x0, x1, s), rng);
}

}  // namespace

Eigen::VectorXd step_blended(const StepContext& ctx, const Eigen::VectorXd& x_t, double s,
                             double t, RandomStream& rng) {
    const auto& x_star = ctx.problem.x_star();
    require(x_star.has_value(), ErrorKind::Capability, "blended sampling needs the reference x_star");
    Eigen::VectorXd x = sample_transition(transition_params(ctx.kernel, ctx.denoiser, x_t, s, t), rng);
    const auto [alpha_s, sigma_s] = ctx.denoiser.schedule().at(s);
    const auto& mask = ctx.problem.mask();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (mask.observed(i)) {
            x[i] = alpha_s * (*x_star)[i] + sigma_s * rng.gaussian();
        }
    }
    return x;
}

Eigen::VectorXd dps_corrected_denoiser(const StepContext& ctx, const Eigen::VectorXd& x_t,
                                       double s, double t) {
    check_step_order(s, t);
    require(ctx.denoiser.has_jacobian(), ErrorKind::Capability,
            "DPS guidance needs a denoiser with a Jacobian");
    const Schedule& schedule = ctx.denoiser.schedule();
    const Eigen::VectorXd x0 = ctx.denoiser.denoise(x_t, t);

    double t_eval = t;
    if (schedule.at(t).alpha == 0.0) {
        t_eval = s > 0.0 ? s : 0.5 * (s + t);
    }
    const ScheduleCoefficients coef = schedule.at(t_eval);
    const Eigen::VectorXd x0_eval = t_eval == t ? x0 : ctx.denoiser.denoise(x_t, t_eval);
    const Eigen::MatrixXd jac = ctx.denoiser.jacobian(x_t, t_eval);

    const auto& mask = ctx.problem.mask();
    const Eigen::VectorXd residual = mask.apply(ctx.problem.y() - mask.apply(x0_eval));
    const double gamma = ctx.problem.gamma();
    const Eigen::VectorXd grad = jac.transpose() * residual / (gamma * gamma);
    return x0 + ctx.config.dps_scale * (coef.sigma * coef.sigma / coef.alpha) * grad;
}

Eigen::VectorXd step_dps(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                         RandomStream& rng) {
    return transition_with(ctx, x_t, dps_corrected_denoiser(ctx, x_t, s, t), s, t, rng);
}

CoordinateGaussian ding_conjugate_law(const InpaintingProblem& problem,
                                      const ScheduleCoefficients& coef_s,
                                      const TransitionParams& transition,
                                      const Eigen::VectorXd& noise_estimate) {
    require(transition.std > 0.0, ErrorKind::InvalidParameter,
            "conjugate update needs a non-degenerate transition");
    const Eigen::Index d = transition.mean.size();
    const double prior_var = transition.std * transition.std;
    const double obs_var = coef_s.alpha * coef_s.alpha * problem.gamma() * problem.gamma();
    const double post_std = std::sqrt(prior_var * obs_var / (prior_var + obs_var));

    CoordinateGaussian law{transition.mean, Eigen::VectorXd::Constant(d, transition.std)};
    const auto& mask = problem.mask();
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!mask.observed(i)) {
            continue;
        }
        const double u = coef_s.alpha * problem.y()[i] + coef_s.sigma * noise_estimate[i];
        law.mean[i] = (obs_var * transition.mean[i] + prior_var * u) / (prior_var + obs_var);
        law.std[i] = post_std;
    }
    return law;
}

Eigen::VectorXd step_ding(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                          RandomStream& rng) {
    const TransitionParams transition = transition_params(ctx.kernel, ctx.denoiser, x_t, s, t);
    if (transition.std == 0.0) {
        return transition.mean;
    }

    const Eigen::Index d = x_t.size();
    const std::size_t nz = ctx.config.ding_nz;
    Eigen::VectorXd noise_estimate = Eigen::VectorXd::Zero(d);
    for (std::size_t j = 0; j < nz; ++j) {
        const Eigen::VectorXd z = sample_transition(transition, rng);
        noise_estimate += ctx.denoiser.noise_predict(z, s);
    }
    noise_estimate /= static_cast<double>(nz);

    const CoordinateGaussian law =
        ding_conjugate_law(ctx.problem, ctx.denoiser.schedule().at(s), transition, noise_estimate);
    const Eigen::VectorXd eps = rng.gaussian(d);
    return law.mean + law.std.cwiseProduct(eps);
}

Eigen::VectorXd ddnm_corrected_denoiser(const StepContext& ctx, const Eigen::VectorXd& x_t,
                                        double t) {
    Eigen::VectorXd x0 = ctx.denoiser.denoise(x_t, t);
    const auto& mask = ctx.problem.mask();
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        if (mask.observed(i)) {
            x0[i] = ctx.problem.y()[i];
        }
    }
    return x0;
}

Eigen::VectorXd step_ddnm(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                          RandomStream& rng) {
    check_step_order(s, t);
    return transition_with(ctx, x_t, ddnm_corrected_denoiser(ctx, x_t, t), s, t, rng);
}

Eigen::VectorXd diffpir_corrected_denoiser(const StepContext& ctx, const Eigen::VectorXd& x_t,
                                           double t) {
    Eigen::VectorXd x0 = ctx.denoiser.denoise(x_t, t);
    const auto [alpha, sigma] = ctx.denoiser.schedule().at(t);
    if (sigma == 0.0) {
        return x0;
    }
    const double rho = ctx.config.diffpir_lambda * alpha * alpha / (sigma * sigma);
    const double data_precision = 1.0 / (ctx.problem.gamma() * ctx.problem.gamma());
    const auto& mask = ctx.problem.mask();
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        if (mask.observed(i)) {
            x0[i] = (ctx.problem.y()[i] * data_precision + rho * x0[i]) / (data_precision + rho);
        }
    }
    return x0;
}

Eigen::VectorXd step_diffpir(const StepContext& ctx, const Eigen::VectorXd& x_t, double s,
                             double t, RandomStream& rng) {
    check_step_order(s, t);
    return transition_with(ctx, x_t, diffpir_corrected_denoiser(ctx, x_t, t), s, t, rng);
}

Eigen::VectorXd guided_step(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                            RandomStream& rng) {
    switch (ctx.config.method) {
        case Method::Blended: return step_blended(ctx, x_t, s, t, rng);
        case Method::Dps: return step_dps(ctx, x_t, s, t, rng);
        case Method::Ding: return step_ding(ctx, x_t, s, t, rng);
        case Method::Ddnm: return step_ddnm(ctx, x_t, s, t, rng);
        case Method::DiffPir: return step_diffpir(ctx, x_t, s, t, rng);
    }
    fail(ErrorKind::Config, "unknown method");
}

ConditionalRun run_conditional(const InpaintingProblem& problem, const Denoiser& denoiser,
                               const SamplerConfig& config) {
    config.validate();
    require(problem.dim() == denoiser.dim(), ErrorKind::Shape,
            "problem and denoiser dimensions differ");
    if (config.method == Method::Blended) {
        require(problem.x_star().has_value(), ErrorKind::Capability,
                "blended sampling needs the reference x_star");
    }
    if (config.method == Method::Dps) {
        require(denoiser.has_jacobian(), ErrorKind::Capability,
                "DPS guidance needs a denoiser with a Jacobian");
    }

    const InpaintingProblem tuned = problem.with_gamma(config.gamma);
    const BridgeKernel kernel(config.eta);
    const StepContext ctx{tuned, kernel, denoiser, config};
    const TimeGrid& grid = config.grid;
    const std::string_view label = to_string(config.method);
    const Eigen::Index d = denoiser.dim();

    ConditionalRun run;
    run.samples.samples.resize(static_cast<Eigen::Index>(config.n_chains), d);
    run.samples.provenance = {std::string(label), 0, config.seed};
    if (config.record_trajectories) {
        run.trajectories.resize(config.n_chains);
    }

    parallel_for(config.n_chains, [&](std::size_t j) {
        RandomStream rng = derive_stream(config.seed, label, j);
        Eigen::VectorXd x = rng.gaussian(d);
        Trajectory* trajectory = config.record_trajectories ? &run.trajectories[j] : nullptr;
        for (std::size_t k = grid.steps(); k >= 1; --k) {
            if (trajectory) {
                trajectory->records.push_back({grid[k], x, denoiser.denoise(x, grid[k])});
            }
            x = guided_step(ctx, x, grid[k - 1], grid[k], rng);
        }
        if (config.final_replacement) {
            const auto& mask = tuned.mask();
            for (Eigen::Index i = 0; i < d; ++i) {
                if (mask.observed(i)) {
                    x[i] = tuned.y()[i];
                }
            }
        }
        if (trajectory) {
            trajectory->records.push_back({grid[0], x, x});
            trajectory->terminal = x;
        }
        run.samples.samples.row(static_cast<Eigen::Index>(j)) = x.transpose();
    });
    return run;
}

}  // namespace ding
