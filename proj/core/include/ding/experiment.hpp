#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ding/config.hpp"
#include "ding/gmm_prior.hpp"
#include "ding/problem.hpp"

namespace ding {

struct ResultRow {
    std::string method;
    std::size_t K = 0;
    double eta = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    double sw2_to_oracle = 0.0;
    double cpsnr = 0.0;  ///< +inf when every observed coordinate matches exactly
    double runtime_ms = 0.0;
    std::size_t n_chains = 0;
};

inline constexpr const char* kResultHeader =
    "method,K,eta,gamma,seed,sw2_to_oracle,cpsnr,runtime_ms,n_chains";

/// Shortest round-trip representation; "inf" for +infinity.
std::string format_double(double v);
/// One CSV line, no trailing newline. runtime_ms is printed with 3 decimals.
std::string format_row(const ResultRow& row);

struct ExperimentOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
    bool write_trajectories = false;
};

/// The inpainting problem of a config: y from (seed, "observation", 0).
InpaintingProblem build_problem(const ExperimentConfig& config);

/// Runs every configured method and writes `results.csv`,
/// `<method>_<seed>.dsmp` and `oracle_<seed>.dsmp` to the output directory.
/// Each row is flushed as soon as its method finishes, so a failure leaves the
/// completed rows on disk.
std::vector<ResultRow> run_experiment(ExperimentConfig config, const ExperimentOptions& options = {});

/// Writes the posterior parameters as CSV with columns
/// component,weight,kind,i,j,value (kind is "mean" or "cov").
void write_mixture_csv(std::ostream& out, const GaussianMixture& mixture);

/// Writes sample rows as CSV with header x0,...,x{d-1}.
void write_samples_csv(std::ostream& out, const Eigen::MatrixXd& samples);

}  // namespace ding
