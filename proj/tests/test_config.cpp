#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ding/config.hpp"
#include "ding/error.hpp"
#include "ding/sample_io.hpp"
#include "support/temp_dir.hpp"

namespace ding {
namespace {

const char* kMinimal = R"(
# comment line
prior.components = 1
prior.0.weight = 1
prior.0.mean = 0 0 0
mask = 1 0 1
x_star = 1 2 3
methods = ding
)";

ExperimentConfig parse(const std::string& text, const std::filesystem::path& base = ".") {
    std::istringstream in(text);
    return parse_experiment_config(in, "test.cfg", base);
}

void expect_config_error(const std::string& text, const std::string& fragment) {
    try {
        parse(text);
        FAIL() << "expected a config error mentioning '" << fragment << "'";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config) << e.what();
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

TEST(KeyValueFile, ParsesAndTracksLines) {
    std::istringstream in("a = 1\n\n  b.c=two words  # trailing\n");
    const KeyValueFile kv = KeyValueFile::parse(in, "f");
    EXPECT_EQ(kv.get_uint("a"), 1u);
    EXPECT_EQ(kv.get_string("b.c"), "two words");
    EXPECT_EQ(kv.canonical(), "a=1\nb.c=two words\n");
}

TEST(KeyValueFile, Errors) {
    std::istringstream no_eq("a = 1\nbroken\n");
    try {
        KeyValueFile::parse(no_eq, "f.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("f.cfg:2"), std::string::npos);
    }
    std::istringstream dup("a = 1\na = 2\n");
    EXPECT_THROW(KeyValueFile::parse(dup, "f"), Error);

    std::istringstream typed("n = -3\nx = abc\nflag = maybe\n");
    const KeyValueFile kv = KeyValueFile::parse(typed, "f");
    EXPECT_THROW(kv.get_uint("n"), Error);
    EXPECT_THROW(kv.get_double("x"), Error);
    EXPECT_THROW(kv.get_bool("flag"), Error);
    EXPECT_THROW(kv.get_string("missing"), Error);
}

TEST(ExperimentConfig, MinimalDefaults) {
    const ExperimentConfig c = parse(kMinimal);
    EXPECT_EQ(c.prior->dim(), 3);
    EXPECT_EQ(c.steps, 50u);
    EXPECT_EQ(c.schedule.kind(), ScheduleKind::LinearFlow);
    ASSERT_EQ(c.methods.size(), 1u);
    EXPECT_EQ(c.methods[0], Method::Ding);
    EXPECT_EQ(c.mask.observed_count(), 2u);
    EXPECT_EQ(c.x_star, Eigen::Vector3d(1, 2, 3));
    EXPECT_EQ(c.prior->covariance(0), Eigen::MatrixXd::Identity(3, 3));
    const SamplerConfig s = c.sampler_for(Method::Ding);
    EXPECT_EQ(s.grid.steps(), 50u);
    EXPECT_EQ(s.eta, 0.8);
    EXPECT_EQ(s.gamma, 0.1);
}

TEST(ExperimentConfig, OverridesApplyPerMethod) {
    const ExperimentConfig c = parse(R"(
prior.components = 1
prior.0.weight = 1
prior.0.mean = 0 0 0
mask = 1 0 1
x_star = 1 2 3
methods = ding, dps
gamma = 0.2
method.dps.zeta = 0.05
method.dps.gamma = 0.3
method.ding.ding_nz = 4
method.ding.final_replacement = off
)");
    EXPECT_EQ(c.sampler_for(Method::Ding).gamma, 0.2);
    EXPECT_EQ(c.sampler_for(Method::Ding).ding_nz, 4u);
    EXPECT_FALSE(c.sampler_for(Method::Ding).final_replacement);
    EXPECT_EQ(c.sampler_for(Method::Dps).gamma, 0.3);
    EXPECT_EQ(c.sampler_for(Method::Dps).dps_scale, 0.05);
    EXPECT_TRUE(c.sampler_for(Method::Dps).final_replacement);
}

TEST(ExperimentConfig, DuplicateMethodsKeyIsRejected) {
    // kMinimal already sets methods; a second assignment is a duplicate.
    EXPECT_THROW(parse(std::string(kMinimal) + "methods = ddnm\n"), Error);
}

TEST(ExperimentConfig, UnknownKeyNamesLine) {
    expect_config_error(std::string(kMinimal) + "grid.stpes = 10\n", "test.cfg:9: grid.stpes");
}

TEST(ExperimentConfig, Validation) {
    expect_config_error(std::string(kMinimal) + "eta = 1.5\n", "eta");
    expect_config_error(std::string(kMinimal) + "method.ding.lambda = 0\n", "lambda");
    expect_config_error(std::string(kMinimal) + "method.pigdm.eta = 0.5\n", "pigdm");
    expect_config_error(std::string(kMinimal) + "method.ding.colour = 1\n", "colour");
    expect_config_error(std::string(kMinimal) + "grid.steps = 0\n", "step count");
    expect_config_error(std::string(kMinimal) + "schedule = cosine\n", "cosine");
    expect_config_error(std::string(kMinimal) + "mask.prefix = 2\n", "exactly one of mask");
}

TEST(ExperimentConfig, ShapeMismatches) {
    expect_config_error(R"(
prior.components = 1
prior.0.weight = 1
prior.0.mean = 0 0
mask = 1 0 1
x_star = 1 2
methods = ding
)",
                        "mask has 3 entries");
    expect_config_error(R"(
prior.components = 1
prior.0.weight = 1
prior.0.mean = 0 0
prior.0.variance = 1
mask = 1 0
x_star = 1 2
methods = ding
)",
                        "variance needs 2");
}

TEST(ExperimentConfig, InvalidPriorIsConfigError) {
    expect_config_error(R"(
prior.components = 2
prior.0.weight = 0.5
prior.0.mean = 0
prior.1.weight = 0.4
prior.1.mean = 1
mask = 1
x_star = 0
methods = ding
)",
                        "invalid prior");
}

TEST(ExperimentConfig, ComponentReferenceIsSeeded) {
    const std::string text = R"(
seed = 5
prior.components = 2
prior.0.weight = 0.5
prior.0.mean = 10 10
prior.1.weight = 0.5
prior.1.mean = -10 -10
mask.prefix = 1
x_star.component = 0
methods = ddnm
)";
    const ExperimentConfig a = parse(text);
    const ExperimentConfig b = parse(text);
    EXPECT_EQ(a.x_star, b.x_star);
    EXPECT_GT(a.x_star.minCoeff(), 5.0);
    EXPECT_EQ(a.config_hash, b.config_hash);
    EXPECT_NE(a.config_hash, parse(std::string(kMinimal)).config_hash);
}

using ConfigFiles = testing::TempDir;

TEST_F(ConfigFiles, PriorCsvAndReferenceFile) {
    {
        std::ofstream csv(dir_ / "prior.csv");
        csv << "weight,m0,m1,v0,v1\n0.25,1,2,1,0.5\n0.75,-1,0,2,2\n";
    }
    Eigen::MatrixXd ref(1, 2);
    ref << 0.5, -0.5;
    write_dsmp(dir_ / "ref.dsmp", ref);
    {
        std::ofstream cfg(dir_ / "exp.cfg");
        cfg << "prior.csv = prior.csv\nx_star.file = ref.dsmp\nmask = 1 0\nmethods = ding\n"
               "output = out\n";
    }
    const ExperimentConfig c = load_experiment_config(dir_ / "exp.cfg");
    EXPECT_EQ(c.prior->size(), 2u);
    EXPECT_EQ(c.prior->weight(0), 0.25);
    EXPECT_EQ(c.prior->covariance(0)(1, 1), 0.5);
    EXPECT_EQ(c.x_star, Eigen::Vector2d(0.5, -0.5));
    EXPECT_EQ(c.output_dir, dir_ / "out");
}

TEST_F(ConfigFiles, FullCovariancePriorCsvRoundTrip) {
    Eigen::MatrixXd cov(2, 2);
    cov << 2.0, 0.3, 0.3, 1.0;
    const GaussianMixture g({0.4, 0.6}, {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)},
                            {cov, Eigen::MatrixXd::Identity(2, 2)});
    {
        std::ofstream out(dir_ / "full.csv");
        write_prior_csv(out, g);
    }
    const GaussianMixture back = read_prior_csv(dir_ / "full.csv");
    EXPECT_EQ(back.weight(0), 0.4);
    EXPECT_EQ(back.covariance(0), cov);
    EXPECT_EQ(back.mean(1), g.mean(1));
}

TEST_F(ConfigFiles, MissingFilesAreIoErrors) {
    try {
        load_experiment_config(dir_ / "nope.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    std::ofstream(dir_ / "exp.cfg") << "prior.csv = absent.csv\nmask = 1\nx_star = 0\nmethods = ding\n";
    try {
        load_experiment_config(dir_ / "exp.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

}  // namespace
}  // namespace ding
