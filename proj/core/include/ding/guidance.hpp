#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ding/bridge.hpp"
#include "ding/denoiser.hpp"
#include "ding/problem.hpp"
#include "ding/random.hpp"
#include "ding/sample_set.hpp"
#include "ding/schedule.hpp"

namespace ding {

enum class Method { Blended, Dps, Ding, Ddnm, DiffPir };

inline constexpr std::array<Method, 5> kAllMethods = {Method::Blended, Method::Dps, Method::Ding,
                                                      Method::Ddnm, Method::DiffPir};

std::string_view to_string(Method method);
/// Unknown names throw ErrorKind::Config.
Method parse_method(std::string_view name);

/// Sampler settings. Fields that a method does not use are ignored.
///
/// The gamma, eta, zeta and lambda defaults are calibration choices for the
/// Gaussian-mixture benchmarks in this repository, not values taken from any
/// large-model experiment.
struct SamplerConfig {
    Method method = Method::Ding;
    TimeGrid grid = make_grid(50);
    double eta = 0.8;
    double gamma = 0.1;           ///< replaces the problem's gamma for the run
    double dps_scale = 1.0;       ///< zeta
    double diffpir_lambda = 1.0;  ///< lambda
    std::size_t ding_nz = 1;      ///< Z_s draws averaged per DInG step
    bool final_replacement = true;
    std::uint64_t seed = 0;
    std::size_t n_chains = 1;
    bool record_trajectories = false;

    void validate() const;
};

struct TrajectoryRecord {
    double t;
    Eigen::VectorXd x;
    Eigen::VectorXd x0_hat;  ///< unconditional denoiser output at (x, t)
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;  ///< K + 1 entries, from t = 1 down to t = 0
    Eigen::VectorXd terminal;
};

/// Everything a single guided step reads. The problem's gamma is the one used.
struct StepContext {
    const InpaintingProblem& problem;
    const BridgeKernel& kernel;
    const Denoiser& denoiser;
    const SamplerConfig& config;
};

/// Independent Gaussian per coordinate.
struct CoordinateGaussian {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;
};

// Per-step randomness is drawn in a fixed order: transition noise (which for
// DInG is the Z_s draw), then any method-specific draw (blended replay noise,
// DInG conjugate draw).

/// Unconditional transition, then observed coordinates replaced by the noised
/// reference alpha_s x_star + sigma_s eps. Needs x_star (ErrorKind::Capability).
Eigen::VectorXd step_blended(const StepContext& ctx, const Eigen::VectorXd& x_t, double s,
                             double t, RandomStream& rng);

/// Clean estimate corrected by the point-estimate likelihood gradient,
/// x0 + zeta (sigma_t^2 / alpha_t) J^T [m (.) (y - m (.) x0)] / gamma^2.
/// At alpha_t = 0 the correction is evaluated at the first interior time
/// (s, or the midpoint of (s, t) when s = 0) since the ratio is 0/0 there.
Eigen::VectorXd dps_corrected_denoiser(const StepContext& ctx, const Eigen::VectorXd& x_t,
                                       double s, double t);
Eigen::VectorXd step_dps(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                         RandomStream& rng);

/// Law of x_s given the transition (mu, eta_s) and the averaged noise
/// prediction e = x1(Z_s, s): conjugate update against the pseudo-observation
/// u = alpha_s y + sigma_s e with variance alpha_s^2 gamma^2 on observed
/// coordinates, the plain transition elsewhere. Requires transition.std > 0.
CoordinateGaussian ding_conjugate_law(const InpaintingProblem& problem,
                                      const ScheduleCoefficients& coef_s,
                                      const TransitionParams& transition,
                                      const Eigen::VectorXd& noise_estimate);

/// Two-stage DInG step. Never calls the denoiser Jacobian.
Eigen::VectorXd step_ding(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                          RandomStream& rng);

/// m (.) y + (1 - m) (.) x0.
Eigen::VectorXd ddnm_corrected_denoiser(const StepContext& ctx, const Eigen::VectorXd& x_t,
                                        double t);
Eigen::VectorXd step_ddnm(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                          RandomStream& rng);

/// Observed coordinates: (y / gamma^2 + rho x0) / (1 / gamma^2 + rho) with
/// rho = lambda alpha_t^2 / sigma_t^2; x0 is returned unchanged at sigma_t = 0.
Eigen::VectorXd diffpir_corrected_denoiser(const StepContext& ctx, const Eigen::VectorXd& x_t,
                                           double t);
Eigen::VectorXd step_diffpir(const StepContext& ctx, const Eigen::VectorXd& x_t, double s,
                             double t, RandomStream& rng);

/// Dispatches on ctx.config.method.
Eigen::VectorXd guided_step(const StepContext& ctx, const Eigen::VectorXd& x_t, double s, double t,
                            RandomStream& rng);

struct ConditionalRun {
    SampleSet samples;
    std::vector<Trajectory> trajectories;  ///< empty unless record_trajectories
};

/// Runs n_chains guided chains from x_1 ~ N(0, I). Chain j draws from
/// derive_stream(seed, method name, j), so results are a pure function of
/// (problem, denoiser, config) and independent of thread count.
ConditionalRun run_conditional(const InpaintingProblem& problem, const Denoiser& denoiser,
                               const SamplerConfig& config);

}  // namespace ding
