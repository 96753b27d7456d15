#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ding/error.hpp"
#include "ding/experiment.hpp"
#include "ding/sample_io.hpp"
#include "support/temp_dir.hpp"

namespace fs = std::filesystem;

namespace ding {
namespace {

std::string small_config(const std::string& methods) {
    return R"(
seed = 7
schedule = trig-vp
grid.steps = 20
prior.components = 2
prior.0.weight = 0.3
prior.0.mean = 1 1 1
prior.0.variance = 0.5 0.5 0.5
prior.1.weight = 0.7
prior.1.mean = -1 0 1
prior.1.covariance = 1 0.2 0, 0.2 1 0, 0 0 1
mask = 1 0 1
x_star = 0.5 0 0.5
chains = 200
methods = )" + methods + "\n";
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_config(in, "test.cfg", ".");
}

std::vector<std::string> lines_of(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::string bytes_of(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Drops the runtime_ms column, the only nondeterministic field.
std::string without_runtime(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
        cells.push_back(cell);
    }
    cells.erase(cells.begin() + 7);
    std::string out;
    for (const auto& c : cells) {
        out += c + ",";
    }
    return out;
}

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(FormatRow, ColumnOrder) {
    const ResultRow row{"ding", 50, 0.8, 0.1, 3, 0.25, 31.5, 12.34567, 1000};
    EXPECT_EQ(format_row(row), "ding,50,0.8,0.1,3,0.25,31.5,12.346,1000");
}

using Experiment = testing::TempDir;

TEST_F(Experiment, SchemaAndFiles) {
    ExperimentConfig c = parse(small_config("ding"));
    c.steps = 50;
    const std::vector<ResultRow> rows = run_experiment(c, {std::nullopt, dir_, false});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].K, 50u);
    EXPECT_EQ(rows[0].n_chains, 200u);
    EXPECT_GT(rows[0].sw2_to_oracle, 0.0);

    const auto lines = lines_of(dir_ / "results.csv");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], kResultHeader);
    EXPECT_EQ(lines[1].substr(0, 13), "ding,50,0.8,0");
    EXPECT_EQ(read_dsmp(dir_ / "ding_7.dsmp").rows(), 200);
    EXPECT_EQ(read_dsmp(dir_ / "oracle_7.dsmp").rows(), 200);
    EXPECT_FALSE(fs::exists(dir_ / "ding_7_trajectories.csv"));
}

TEST_F(Experiment, RerunIsByteIdenticalExceptRuntime) {
    const ExperimentConfig c = parse(small_config("ding, dps, ddnm, diffpir, blended"));
    run_experiment(c, {std::nullopt, dir_ / "a", false});
    run_experiment(c, {std::nullopt, dir_ / "b", false});
    const auto a = lines_of(dir_ / "a" / "results.csv");
    const auto b = lines_of(dir_ / "b" / "results.csv");
    ASSERT_EQ(a.size(), 6u);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 1; i < a.size(); ++i) {
        EXPECT_EQ(without_runtime(a[i]), without_runtime(b[i]));
    }
    for (const char* name : {"ding_7.dsmp", "dps_7.dsmp", "blended_7.dsmp", "oracle_7.dsmp"}) {
        EXPECT_EQ(bytes_of(dir_ / "a" / name), bytes_of(dir_ / "b" / name)) << name;
    }
}

TEST_F(Experiment, MethodOrderDoesNotChangeSamples) {
    run_experiment(parse(small_config("ding, ddnm")), {std::nullopt, dir_ / "a", false});
    run_experiment(parse(small_config("ddnm, ding")), {std::nullopt, dir_ / "b", false});
    EXPECT_EQ(bytes_of(dir_ / "a" / "ding_7.dsmp"), bytes_of(dir_ / "b" / "ding_7.dsmp"));
    EXPECT_EQ(bytes_of(dir_ / "a" / "ddnm_7.dsmp"), bytes_of(dir_ / "b" / "ddnm_7.dsmp"));
}

TEST_F(Experiment, SeedOverrideChangesOutputNames) {
    const ExperimentConfig c = parse(small_config("ddnm"));
    const auto rows = run_experiment(c, {std::uint64_t{11}, dir_, false});
    EXPECT_EQ(rows[0].seed, 11u);
    EXPECT_TRUE(fs::exists(dir_ / "ddnm_11.dsmp"));
    EXPECT_NE(bytes_of(dir_ / "ddnm_11.dsmp"), "");
}

TEST_F(Experiment, TrajectoriesCsv) {
    ExperimentConfig c = parse(small_config("ddnm"));
    c.n_chains = 2;
    run_experiment(c, {std::nullopt, dir_, true});
    const auto lines = lines_of(dir_ / "ddnm_7_trajectories.csv");
    ASSERT_FALSE(lines.empty());
    EXPECT_EQ(lines[0], "chain,k,t,coord,x,xhat0");
    // 2 chains x 21 records x 3 coordinates
    EXPECT_EQ(lines.size(), 1u + 2u * 21u * 3u);
    EXPECT_EQ(lines[1].substr(0, 8), "0,0,1,0,");
}

TEST_F(Experiment, CompletedRowsSurviveALaterFailure) {
    const ExperimentConfig c = parse(small_config("ding, ddnm"));
    // A directory where the second method's sample file should go.
    fs::create_directories(dir_ / "ddnm_7.dsmp");
    try {
        run_experiment(c, {std::nullopt, dir_, false});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    const auto lines = lines_of(dir_ / "results.csv");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[1].substr(0, 5), "ding,");
}

TEST(BuildProblem, ObservationIsSeeded) {
    const ExperimentConfig c = parse(small_config("ding"));
    const InpaintingProblem a = build_problem(c);
    const InpaintingProblem b = build_problem(c);
    EXPECT_EQ(a.y(), b.y());
    EXPECT_EQ(a.gamma(), 0.1);
    // Noise-free by default: observed coordinates equal the reference.
    EXPECT_EQ(a.y()[0], 0.5);
    EXPECT_EQ(a.y()[1], 0.0);
}

TEST(MixtureCsv, Layout) {
    const GaussianMixture g =
        GaussianMixture::gaussian(Eigen::Vector2d(1.0, 2.0), Eigen::Matrix2d::Identity());
    std::ostringstream out;
    write_mixture_csv(out, g);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "component,weight,kind,i,j,value");
    EXPECT_NE(text.find("0,1,mean,1,0,2\n"), std::string::npos);
    EXPECT_NE(text.find("0,1,cov,0,1,0\n"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 + 4);
}

TEST(SamplesCsv, Layout) {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2.5, -3, 0;
    std::ostringstream out;
    write_samples_csv(out, m);
    EXPECT_EQ(out.str(), "x0,x1\n1,2.5\n-3,0\n");
}

}  // namespace
}  // namespace ding
