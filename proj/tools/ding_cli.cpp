// ding: experiment harness and thin wrappers over the oracle, mask-lifting and
// metric routines.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ding/config.hpp"
#include "ding/error.hpp"
#include "ding/experiment.hpp"
#include "ding/mask_io.hpp"
#include "ding/masklift.hpp"
#include "ding/metrics.hpp"
#include "ding/oracle.hpp"
#include "ding/random.hpp"
#include "ding/sample_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

int exit_code(ding::ErrorKind kind) {
    switch (kind) {
        case ding::ErrorKind::Io:
            return kExitIo;
        case ding::ErrorKind::Numeric:
        case ding::ErrorKind::NumericInput:
            return kExitNumeric;
        default:
            return kExitConfig;
    }
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream out(path);
    if (!out.is_open()) {
        ding::fail(ding::ErrorKind::Io, "cannot open " + path.string() + " for writing");
    }
    return out;
}

bool is_dmsk(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        ding::fail(ding::ErrorKind::Io, "cannot open " + path.string());
    }
    char magic[4] = {};
    in.read(magic, 4);
    return in && std::string(magic, 4) == "DMSK";
}

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string format = "csv";
    bool trajectories = false;
};

void cmd_run(const RunArgs& args) {
    ding::ExperimentOptions options;
    options.seed = args.seed;
    if (args.out) {
        options.output_dir = fs::path(*args.out);
    }
    options.write_trajectories = args.trajectories;
    const auto rows = ding::run_experiment(ding::load_experiment_config(args.config), options);
    if (args.format == "none") {
        return;
    }
    std::cout << ding::kResultHeader << '\n';
    for (const auto& row : rows) {
        std::cout << ding::format_row(row) << '\n';
    }
}

struct OracleArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::string> samples_out;
    std::optional<std::size_t> n;
    std::string format = "csv";
};

void cmd_oracle(const OracleArgs& args) {
    ding::ExperimentConfig config = ding::load_experiment_config(args.config);
    if (args.seed) {
        config.seed = *args.seed;
    }
    const ding::InpaintingProblem problem = ding::build_problem(config);
    const ding::GaussianMixture posterior = ding::exact_posterior(problem, *config.prior);
    {
        std::ofstream out = open_text(args.out);
        ding::write_mixture_csv(out, posterior);
    }
    if (!args.samples_out) {
        return;
    }
    const std::size_t n = args.n.value_or(
        config.oracle_samples == 0 ? config.n_chains : config.oracle_samples);
    ding::RandomStream rng = ding::derive_stream(config.seed, "oracle", 0);
    const Eigen::MatrixXd samples = posterior.sample(rng, n);
    if (args.format == "dsmp") {
        ding::write_dsmp(fs::path(*args.samples_out), samples);
    } else {
        std::ofstream out = open_text(*args.samples_out);
        ding::write_samples_csv(out, samples);
    }
}

struct MaskliftArgs {
    std::vector<std::string> inputs;
    std::vector<std::size_t> factors;
    std::optional<std::size_t> dilate;
    std::size_t dilate_time = 0;
    std::string out;
    std::string format = "dmsk";
};

void cmd_masklift(const MaskliftArgs& args) {
    ding::LiftFactors factors;
    if (args.factors.size() == 2) {
        factors = {1, args.factors[0], args.factors[1]};
    } else if (args.factors.size() == 3) {
        factors = {args.factors[0], args.factors[1], args.factors[2]};
    } else {
        ding::fail(ding::ErrorKind::Config, "--factors takes H,W or T,H,W");
    }

    ding::PixelMask pixel;
    if (args.inputs.size() == 1 && is_dmsk(args.inputs.front())) {
        pixel.grid = ding::read_dmsk(args.inputs.front());
    } else {
        std::vector<fs::path> paths(args.inputs.begin(), args.inputs.end());
        pixel.grid = ding::read_pgm_frames(paths);
    }

    const std::size_t radius = args.dilate.value_or(ding::default_dilation(factors));
    const ding::LatentMask latent = ding::lift_mask(pixel, factors, radius, args.dilate_time);

    if (args.format == "pgm") {
        const std::size_t frames = latent.grid.shape().frames;
        const fs::path out(args.out);
        for (std::size_t t = 0; t < frames; ++t) {
            fs::path path = out;
            if (frames > 1) {
                path = out.parent_path() /
                       (out.stem().string() + "_" + std::to_string(t) + out.extension().string());
            }
            ding::write_pgm(path, latent.grid, t);
        }
    } else {
        ding::write_dmsk(args.out, latent.grid);
    }

    const ding::LeakageReport report = ding::leakage_report(pixel, latent, factors);
    const ding::VolumeShape& s = latent.grid.shape();
    std::cout << "edited_pixels_in_observed_cells,observed_pixels_in_edited_cells,"
                 "latent_frames,latent_height,latent_width,radius,time_radius\n"
              << report.edited_pixels_in_observed_cells << ','
              << report.observed_pixels_in_edited_cells << ',' << s.frames << ',' << s.height
              << ',' << s.width << ',' << radius << ',' << args.dilate_time << '\n';
}

struct MetricsArgs {
    std::string a;
    std::string b;
    std::string metric = "sw2";
    std::size_t projections = ding::kDefaultProjections;
    std::uint64_t seed = 0;
    std::optional<std::string> config;
};

void cmd_metrics(const MetricsArgs& args) {
    const Eigen::MatrixXd a = ding::read_dsmp(fs::path(args.a));
    const Eigen::MatrixXd b = ding::read_dsmp(fs::path(args.b));
    double value = 0.0;
    if (args.metric == "sw2") {
        if (a.cols() != b.cols()) {
            ding::fail(ding::ErrorKind::Shape, "sample files have different dimensions");
        }
        value = ding::sliced_w2(a, b, ding::random_directions(a.cols(), args.projections, args.seed));
    } else if (args.metric == "cpsnr") {
        if (!args.config) {
            ding::fail(ding::ErrorKind::Config, "--metric cpsnr needs --config for the mask");
        }
        if (b.rows() < 1) {
            ding::fail(ding::ErrorKind::Config, "reference file holds no sample");
        }
        const ding::ExperimentConfig config = ding::load_experiment_config(*args.config);
        value = ding::cpsnr(a, b.row(0).transpose(), config.mask, config.peak);
    } else {
        ding::fail(ding::ErrorKind::Config, "unknown metric '" + args.metric + "'");
    }
    std::cout << "metric,value,n,seed\n"
              << args.metric << ',' << ding::format_double(value) << ',' << a.rows() << ','
              << args.seed << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free posterior sampling lab for inpainting with Gaussian-mixture priors"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run every method of an experiment config");
    run_cmd->add_option("--config", run.config, "Experiment config file")->required();
    run_cmd->add_option("--seed", run.seed, "Override the master seed");
    run_cmd->add_option("--out", run.out, "Override the output directory");
    run_cmd->add_option("--format", run.format, "Stdout format")
        ->check(CLI::IsMember({"csv", "none"}));
    run_cmd->add_flag("--trajectories", run.trajectories, "Also write per-step trajectories");

    OracleArgs oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "Dump the exact posterior of a config");
    oracle_cmd->add_option("--config", oracle.config, "Experiment config file")->required();
    oracle_cmd->add_option("--seed", oracle.seed, "Override the master seed");
    oracle_cmd->add_option("--out", oracle.out, "Posterior mixture CSV")->required();
    oracle_cmd->add_option("--samples", oracle.samples_out, "Also write posterior samples here");
    oracle_cmd->add_option("-n", oracle.n, "Number of posterior samples");
    oracle_cmd->add_option("--format", oracle.format, "Sample file format")
        ->check(CLI::IsMember({"csv", "dsmp"}));

    MaskliftArgs lift;
    auto* lift_cmd = app.add_subcommand("masklift", "Lift a pixel mask to a latent grid");
    lift_cmd->add_option("--in", lift.inputs, "PGM frames or one DMSK file")->required();
    lift_cmd->add_option("--factors", lift.factors, "H,W or T,H,W downsampling factors")
        ->delimiter(',')
        ->required();
    lift_cmd->add_option("--dilate", lift.dilate, "Spatial dilation radius (default H/2)");
    lift_cmd->add_option("--dilate-time", lift.dilate_time, "Dilation radius along frames");
    lift_cmd->add_option("--out", lift.out, "Latent mask output path")->required();
    lift_cmd->add_option("--format", lift.format, "Latent mask format")
        ->check(CLI::IsMember({"dmsk", "pgm"}));

    MetricsArgs metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "Compare two sample files");
    metrics_cmd->add_option("--a", metrics.a, "Sample file")->required();
    metrics_cmd->add_option("--b", metrics.b, "Reference sample file")->required();
    metrics_cmd->add_option("--metric", metrics.metric, "sw2 or cpsnr")
        ->check(CLI::IsMember({"sw2", "cpsnr"}));
    metrics_cmd->add_option("--projections", metrics.projections, "Sliced W2 projections");
    metrics_cmd->add_option("--seed", metrics.seed, "Projection seed");
    metrics_cmd->add_option("--config", metrics.config, "Config providing the cPSNR mask");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) {
            cmd_run(run);
        } else if (*oracle_cmd) {
            cmd_oracle(oracle);
        } else if (*lift_cmd) {
            cmd_masklift(lift);
        } else if (*metrics_cmd) {
            cmd_metrics(metrics);
        }
    } catch (const ding::Error& e) {
        std::cerr << "ding: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "ding: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
