#include "ding/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ding/error.hpp"
#include "ding/random.hpp"

namespace ding {

namespace {

double to_db(double peak, double mse) {
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(peak * peak / mse);
}

double quantile(const std::vector<double>& sorted, double q) {
    const double n = static_cast<double>(sorted.size());
    const double pos = std::clamp(q * n - 0.5, 0.0, n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= sorted.size()) {
        return sorted[lo];
    }
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> project_sorted(const Eigen::MatrixXd& samples, const Eigen::VectorXd& dir) {
    const Eigen::VectorXd p = samples * dir;
    std::vector<double> out(p.data(), p.data() + p.size());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

double cpsnr(const Eigen::VectorXd& x, const Eigen::VectorXd& x_ref, const MaskOperator& mask,
             double peak) {
    Eigen::MatrixXd row = x.transpose();
    return cpsnr(row, x_ref, mask, peak);
}

double cpsnr(const Eigen::MatrixXd& samples, const Eigen::VectorXd& x_ref,
             const MaskOperator& mask, double peak) {
    require(std::isfinite(peak) && peak > 0.0, ErrorKind::InvalidParameter, "peak must be positive");
    require(mask.observed_count() > 0, ErrorKind::InvalidParameter,
            "cPSNR needs at least one observed coordinate");
    require(samples.cols() == x_ref.size() && x_ref.size() == mask.dim(), ErrorKind::Shape,
            "cPSNR inputs have mismatched dimensions");
    require(samples.rows() >= 1, ErrorKind::InvalidParameter, "cPSNR needs at least one sample");
    double sq = 0.0;
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        for (Eigen::Index i = 0; i < x_ref.size(); ++i) {
            if (mask.observed(i)) {
                const double e = samples(r, i) - x_ref[i];
                sq += e * e;
            }
        }
    }
    const double count = static_cast<double>(mask.observed_count()) *
                         static_cast<double>(samples.rows());
    return to_db(peak, sq / count);
}

double wasserstein2_squared_1d(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), ErrorKind::InvalidParameter,
            "Wasserstein distance needs non-empty samples");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const std::size_t n = std::max(sa.size(), sb.size());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double diff = quantile(sa, q) - quantile(sb, q);
        total += diff * diff;
    }
    return total / static_cast<double>(n);
}

Eigen::MatrixXd random_directions(Eigen::Index dim, std::size_t count, std::uint64_t seed) {
    require(dim >= 1, ErrorKind::InvalidParameter, "direction dimension must be >= 1");
    require(count >= 1, ErrorKind::InvalidParameter, "need at least one projection");
    RandomStream rng = derive_stream(seed, "sliced_w2", 0);
    Eigen::MatrixXd dirs(static_cast<Eigen::Index>(count), dim);
    for (Eigen::Index l = 0; l < dirs.rows(); ++l) {
        Eigen::VectorXd v;
        do {
            v = rng.gaussian(dim);
        } while (v.norm() == 0.0);
        dirs.row(l) = v.normalized().transpose();
    }
    return dirs;
}

double sliced_w2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 const Eigen::MatrixXd& directions) {
    require(a.cols() == b.cols() && a.cols() == directions.cols(), ErrorKind::Shape,
            "sliced W2 inputs have different dimensions");
    require(directions.rows() >= 1, ErrorKind::InvalidParameter, "need at least one projection");
    double total = 0.0;
    for (Eigen::Index l = 0; l < directions.rows(); ++l) {
        const Eigen::VectorXd dir = directions.row(l).transpose();
        const std::vector<double> pa = project_sorted(a, dir);
        const std::vector<double> pb = project_sorted(b, dir);
        total += wasserstein2_squared_1d(pa, pb);
    }
    return std::sqrt(total / static_cast<double>(directions.rows()));
}

double sliced_w2(const SampleSet& a, const SampleSet& b, std::size_t projections,
                 std::uint64_t seed) {
    require(a.dim() == b.dim(), ErrorKind::Shape, "sliced W2 inputs have different dimensions");
    return sliced_w2(a.samples, b.samples, random_directions(a.dim(), projections, seed));
}

MomentError moment_diff(const SampleSet& samples, const GaussianMixture& reference) {
    require(samples.dim() == reference.dim(), ErrorKind::Shape,
            "samples and reference have different dimensions");
    require(samples.size() >= 2, ErrorKind::InvalidParameter,
            "sample covariance needs at least two samples");
    const Eigen::VectorXd mean = samples.samples.colwise().mean().transpose();
    const Eigen::MatrixXd centered = samples.samples.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(samples.size() - 1);
    return {(mean - reference.mixture_mean()).norm(),
            (cov - reference.mixture_covariance()).norm()};
}

}  // namespace ding
