#include "ding/problem.hpp"

#include <cmath>
#include <iostream>

#include "ding/error.hpp"

namespace ding {

MaskOperator::MaskOperator(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (std::uint8_t b : bits_) {
        require(b <= 1, ErrorKind::InvalidParameter, "mask entries must be 0 or 1");
        observed_count_ += b;
    }
}

MaskOperator MaskOperator::from_vector(const Eigen::VectorXd& m) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        require(m[i] == 0.0 || m[i] == 1.0, ErrorKind::InvalidParameter,
                "mask entries must be 0 or 1");
        bits[static_cast<std::size_t>(i)] = m[i] == 1.0 ? 1 : 0;
    }
    return MaskOperator(std::move(bits));
}

MaskOperator MaskOperator::all(Eigen::Index d, bool observed) {
    return MaskOperator(std::vector<std::uint8_t>(static_cast<std::size_t>(d), observed ? 1 : 0));
}

MaskOperator MaskOperator::prefix(Eigen::Index d, Eigen::Index observed) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d), 0);
    for (Eigen::Index i = 0; i < observed && i < d; ++i) {
        bits[static_cast<std::size_t>(i)] = 1;
    }
    return MaskOperator(std::move(bits));
}

std::vector<Eigen::Index> MaskOperator::observed_indices() const {
    std::vector<Eigen::Index> idx;
    idx.reserve(observed_count_);
    for (Eigen::Index i = 0; i < dim(); ++i) {
        if (observed(i)) {
            idx.push_back(i);
        }
    }
    return idx;
}

Eigen::VectorXd MaskOperator::as_vector() const {
    Eigen::VectorXd m(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) {
        m[i] = observed(i) ? 1.0 : 0.0;
    }
    return m;
}

Eigen::VectorXd MaskOperator::apply(const Eigen::VectorXd& v) const {
    require(v.size() == dim(), ErrorKind::Shape, "mask and vector dimensions differ");
    Eigen::VectorXd out(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) {
        out[i] = observed(i) ? v[i] : 0.0;
    }
    return out;
}

InpaintingProblem::InpaintingProblem(MaskOperator mask, Eigen::VectorXd y, double gamma,
                                     std::optional<Eigen::VectorXd> x_star)
    : mask_(std::move(mask)), y_(std::move(y)), gamma_(gamma), x_star_(std::move(x_star)) {
    require(std::isfinite(gamma_) && gamma_ > 0.0, ErrorKind::InvalidParameter,
            "gamma must be positive");
    require(y_.size() == mask_.dim(), ErrorKind::Shape, "observation and mask dimensions differ");
    require(y_.allFinite(), ErrorKind::NumericInput, "observation contains non-finite values");
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
        require(mask_.observed(i) || y_[i] == 0.0, ErrorKind::InvalidParameter,
                "observation must be zero on unobserved coordinates");
    }
    if (x_star_) {
        require(x_star_->size() == y_.size(), ErrorKind::Shape,
                "reference and observation dimensions differ");
    }
}

InpaintingProblem InpaintingProblem::with_gamma(double gamma) const {
    return InpaintingProblem(mask_, y_, gamma, x_star_);
}

InpaintingProblem make_observation(const Eigen::VectorXd& x_star, const MaskOperator& mask,
                                   double gamma, RandomStream& rng, bool noisy) {
    require(std::isfinite(gamma) && gamma > 0.0, ErrorKind::InvalidParameter,
            "gamma must be positive");
    require(x_star.size() == mask.dim(), ErrorKind::Shape, "reference and mask dimensions differ");
    Eigen::VectorXd y = mask.apply(x_star);
    if (noisy) {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (mask.observed(i)) {
                y[i] += gamma * rng.gaussian();
            }
        }
    }
    if (mask.observed_count() == 0) {
        std::cerr << "warning: mask has no observed coordinate; the posterior equals the prior\n";
    }
    return InpaintingProblem(mask, std::move(y), gamma, x_star);
}

double log_likelihood(const InpaintingProblem& problem, const Eigen::VectorXd& x0) {
    require(x0.size() == problem.dim(), ErrorKind::Shape, "input dimension does not match problem");
    require(x0.allFinite(), ErrorKind::NumericInput, "likelihood input contains non-finite values");
    double sq = 0.0;
    const auto& mask = problem.mask();
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        if (mask.observed(i)) {
            const double r = problem.y()[i] - x0[i];
            sq += r * r;
        }
    }
    const double g = problem.gamma();
    return -sq / (2.0 * g * g);
}

}  // namespace ding
