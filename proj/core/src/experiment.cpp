#include "ding/experiment.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

#include "ding/error.hpp"
#include "ding/guidance.hpp"
#include "ding/metrics.hpp"
#include "ding/oracle.hpp"
#include "ding/random.hpp"
#include "ding/sample_io.hpp"

namespace ding {

std::string format_double(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (std::isnan(v)) {
        return "nan";
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string format_row(const ResultRow& row) {
    std::array<char, 64> rt{};
    auto [ptr, ec] = std::to_chars(rt.data(), rt.data() + rt.size(), row.runtime_ms,
                                   std::chars_format::fixed, 3);
    return row.method + "," + std::to_string(row.K) + "," + format_double(row.eta) + "," +
           format_double(row.gamma) + "," + std::to_string(row.seed) + "," +
           format_double(row.sw2_to_oracle) + "," + format_double(row.cpsnr) + "," +
           std::string(rt.data(), ptr) + "," + std::to_string(row.n_chains);
}

InpaintingProblem build_problem(const ExperimentConfig& config) {
    RandomStream rng = derive_stream(config.seed, "observation", 0);
    return make_observation(config.x_star, config.mask, config.sampler.gamma, rng,
                            config.noisy_observation);
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) {
        fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    }
    return out;
}

void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& runs) {
    std::ofstream out = open_output(path);
    out << "chain,k,t,coord,x,xhat0\n";
    for (std::size_t j = 0; j < runs.size(); ++j) {
        const auto& records = runs[j].records;
        for (std::size_t k = 0; k < records.size(); ++k) {
            const TrajectoryRecord& r = records[k];
            for (Eigen::Index i = 0; i < r.x.size(); ++i) {
                out << j << ',' << k << ',' << format_double(r.t) << ',' << i << ','
                    << format_double(r.x[i]) << ',' << format_double(r.x0_hat[i]) << '\n';
            }
        }
    }
    if (!out) {
        fail(ErrorKind::Io, "failed to write " + path.string());
    }
}

}  // namespace

std::vector<ResultRow> run_experiment(ExperimentConfig config, const ExperimentOptions& options) {
    if (options.seed) {
        config.seed = *options.seed;
    }
    if (options.output_dir) {
        config.output_dir = *options.output_dir;
    }
    require(config.prior != nullptr, ErrorKind::Config, "experiment config has no prior");

    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) {
        fail(ErrorKind::Io, "cannot create " + config.output_dir.string() + ": " + ec.message());
    }

    const InpaintingProblem problem = build_problem(config);
    const GaussianMixture posterior = exact_posterior(problem, *config.prior);
    const std::size_t n_oracle = config.oracle_samples == 0 ? config.n_chains : config.oracle_samples;
    RandomStream oracle_rng = derive_stream(config.seed, "oracle", 0);
    const Eigen::MatrixXd oracle_samples = posterior.sample(oracle_rng, n_oracle);
    const std::string seed_text = std::to_string(config.seed);
    write_dsmp(config.output_dir / ("oracle_" + seed_text + ".dsmp"), oracle_samples);
    const Eigen::MatrixXd directions =
        random_directions(config.prior->dim(), config.projections, config.seed);

    const GmmDenoiser denoiser(config.prior, config.schedule);

    const std::filesystem::path csv_path = config.output_dir / "results.csv";
    std::ofstream csv = open_output(csv_path);
    csv << kResultHeader << '\n' << std::flush;

    std::vector<ResultRow> rows;
    for (Method method : config.methods) {
        SamplerConfig sampler = config.sampler_for(method);
        sampler.record_trajectories = options.write_trajectories;
        const std::string name(to_string(method));

        const auto start = std::chrono::steady_clock::now();
        const ConditionalRun run = run_conditional(problem, denoiser, sampler);
        const auto stop = std::chrono::steady_clock::now();

        if (!run.samples.samples.allFinite()) {
            fail(ErrorKind::Numeric, name + " produced non-finite samples");
        }

        ResultRow row;
        row.method = name;
        row.K = sampler.grid.steps();
        row.eta = sampler.eta;
        row.gamma = sampler.gamma;
        row.seed = config.seed;
        row.sw2_to_oracle = sliced_w2(run.samples.samples, oracle_samples, directions);
        row.cpsnr = problem.degenerate()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : cpsnr(run.samples.samples, config.x_star, config.mask, config.peak);
        row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        row.n_chains = sampler.n_chains;

        write_dsmp(config.output_dir / (name + "_" + seed_text + ".dsmp"), run.samples.samples);
        if (options.write_trajectories) {
            write_trajectories(config.output_dir / (name + "_" + seed_text + "_trajectories.csv"),
                               run.trajectories);
        }
        csv << format_row(row) << '\n' << std::flush;
        if (!csv) {
            fail(ErrorKind::Io, "failed to write " + csv_path.string());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_mixture_csv(std::ostream& out, const GaussianMixture& mixture) {
    out << "component,weight,kind,i,j,value\n";
    const Eigen::Index d = mixture.dim();
    for (std::size_t k = 0; k < mixture.size(); ++k) {
        const std::string prefix = std::to_string(k) + "," + format_double(mixture.weight(k)) + ",";
        for (Eigen::Index i = 0; i < d; ++i) {
            out << prefix << "mean," << i << ",0," << format_double(mixture.mean(k)[i]) << '\n';
        }
        const Eigen::MatrixXd cov = mixture.covariance(k);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                out << prefix << "cov," << i << ',' << j << ',' << format_double(cov(i, j)) << '\n';
            }
        }
    }
}

void write_samples_csv(std::ostream& out, const Eigen::MatrixXd& samples) {
    for (Eigen::Index i = 0; i < samples.cols(); ++i) {
        out << (i == 0 ? "" : ",") << 'x' << i;
    }
    out << '\n';
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        for (Eigen::Index i = 0; i < samples.cols(); ++i) {
            out << (i == 0 ? "" : ",") << format_double(samples(r, i));
        }
        out << '\n';
    }
}

}  // namespace ding
