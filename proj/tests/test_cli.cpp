#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "ding/mask_io.hpp"
#include "ding/sample_io.hpp"
#include "support/temp_dir.hpp"

namespace fs = std::filesystem;

namespace ding {
namespace {

struct Result {
    int code;
    std::string out;
};

class Cli : public testing::TempDir {
protected:
    Result run(const std::string& args) {
        const fs::path out = dir_ / "stdout.txt";
        const std::string cmd = std::string(DING_CLI_PATH) + " " + args + " > " + out.string() +
                                " 2> " + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        std::ifstream in(out);
        std::stringstream ss;
        ss << in.rdbuf();
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
    }

    fs::path write_config(const std::string& extra = "") {
        const fs::path path = dir_ / "exp.cfg";
        std::ofstream(path) << "seed = 3\ngrid.steps = 10\nprior.components = 1\n"
                               "prior.0.weight = 1\nprior.0.mean = 0 0\nmask = 1 0\n"
                               "x_star = 0.5 0.5\nchains = 50\nmethods = ding, ddnm\n"
                               "output = out\n"
                            << extra;
        return path;
    }
};

TEST_F(Cli, RunPrintsResults) {
    const fs::path cfg = write_config();
    const Result r = run("run --config " + cfg.string());
    ASSERT_EQ(r.code, 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, "method,K,eta,gamma,seed,sw2_to_oracle,cpsnr,runtime_ms,n_chains");
    std::string row;
    std::getline(lines, row);
    EXPECT_EQ(row.substr(0, 8), "ding,10,");
    EXPECT_TRUE(fs::exists(dir_ / "out" / "ding_3.dsmp"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "results.csv"));
}

TEST_F(Cli, RunOverrides) {
    const fs::path cfg = write_config();
    const Result r =
        run("run --config " + cfg.string() + " --seed 9 --out " + (dir_ / "o2").string() +
            " --format none --trajectories");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
    EXPECT_TRUE(fs::exists(dir_ / "o2" / "ddnm_9.dsmp"));
    EXPECT_TRUE(fs::exists(dir_ / "o2" / "ddnm_9_trajectories.csv"));
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("run").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("run --config " + (dir_ / "missing.cfg").string()).code, 3);
    const fs::path cfg = write_config("bogus.key = 1\n");
    EXPECT_EQ(run("run --config " + cfg.string()).code, 2);
}

TEST_F(Cli, OracleWritesPosterior) {
    const fs::path cfg = write_config();
    const Result r = run("oracle --config " + cfg.string() + " --out " +
                         (dir_ / "post.csv").string() + " --samples " +
                         (dir_ / "post.dsmp").string() + " -n 25 --format dsmp");
    ASSERT_EQ(r.code, 0);
    std::ifstream in(dir_ / "post.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "component,weight,kind,i,j,value");
    EXPECT_EQ(read_dsmp(dir_ / "post.dsmp").rows(), 25);
}

TEST_F(Cli, MaskliftReportsLeakage) {
    BinaryVolume v({1, 16, 16}, 1);
    v.set(0, 5, 5, 0);
    write_pgm(dir_ / "m.pgm", v);
    const Result r = run("masklift --in " + (dir_ / "m.pgm").string() + " --factors 8,8 --out " +
                         (dir_ / "l.dmsk").string());
    ASSERT_EQ(r.code, 0);
    // Default radius 4 spreads pixel (5, 5) over all four 8 x 8 cells.
    EXPECT_EQ(r.out,
              "edited_pixels_in_observed_cells,observed_pixels_in_edited_cells,latent_frames,"
              "latent_height,latent_width,radius,time_radius\n0,255,1,2,2,4,0\n");
    EXPECT_EQ(read_dmsk(dir_ / "l.dmsk").count_observed(), 0u);

    const Result plain = run("masklift --in " + (dir_ / "m.pgm").string() +
                             " --factors 8,8 --dilate 0 --out " + (dir_ / "p.dmsk").string());
    ASSERT_EQ(plain.code, 0);
    EXPECT_EQ(plain.out.substr(plain.out.find('\n') + 1), "0,63,1,2,2,0,0\n");
    const BinaryVolume latent = read_dmsk(dir_ / "p.dmsk");
    EXPECT_EQ(latent.at(0, 0, 0), 0);
    EXPECT_EQ(latent.at(0, 1, 1), 1);
    EXPECT_EQ(run("masklift --in " + (dir_ / "m.pgm").string() + " --factors 3,3 --out " +
                  (dir_ / "x.dmsk").string())
                  .code,
              2);
}

TEST_F(Cli, MetricsSw2) {
    Eigen::MatrixXd a(2, 1);
    a << 0.0, 1.0;
    Eigen::MatrixXd b(2, 1);
    b << 1.0, 2.0;
    write_dsmp(dir_ / "a.dsmp", a);
    write_dsmp(dir_ / "b.dsmp", b);
    const Result r = run("metrics --a " + (dir_ / "a.dsmp").string() + " --b " +
                         (dir_ / "b.dsmp").string() + " --seed 4");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "metric,value,n,seed\nsw2,1,2,4\n");
    EXPECT_EQ(run("metrics --a " + (dir_ / "a.dsmp").string() + " --b " +
                  (dir_ / "b.dsmp").string() + " --metric cpsnr")
                  .code,
              2);
}

}  // namespace
}  // namespace ding
