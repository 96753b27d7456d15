#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ding/random.hpp"

namespace ding {

/// Binary coordinate mask; 1 marks an observed (preserved) coordinate.
class MaskOperator {
public:
    MaskOperator() = default;
    explicit MaskOperator(std::vector<std::uint8_t> bits);

    static MaskOperator from_vector(const Eigen::VectorXd& m);
    static MaskOperator all(Eigen::Index d, bool observed);
    /// First `observed` coordinates observed, the rest not.
    static MaskOperator prefix(Eigen::Index d, Eigen::Index observed);

    Eigen::Index dim() const { return static_cast<Eigen::Index>(bits_.size()); }
    bool observed(Eigen::Index i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
    std::size_t observed_count() const { return observed_count_; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<Eigen::Index> observed_indices() const;

    Eigen::VectorXd as_vector() const;
    /// m (.) v
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

    friend bool operator==(const MaskOperator&, const MaskOperator&) = default;

private:
    std::vector<std::uint8_t> bits_;
    std::size_t observed_count_ = 0;
};

/// Inpainting observation y = m (.) x_star with Gaussian consistency scale
/// gamma. y is stored full length, zero off the observed support.
class InpaintingProblem {
public:
    InpaintingProblem(MaskOperator mask, Eigen::VectorXd y, double gamma,
                      std::optional<Eigen::VectorXd> x_star = std::nullopt);

    const MaskOperator& mask() const { return mask_; }
    const Eigen::VectorXd& y() const { return y_; }
    double gamma() const { return gamma_; }
    const std::optional<Eigen::VectorXd>& x_star() const { return x_star_; }
    Eigen::Index dim() const { return y_.size(); }

    /// No observed coordinate: the posterior is the prior.
    bool degenerate() const { return mask_.observed_count() == 0; }

    InpaintingProblem with_gamma(double gamma) const;

private:
    MaskOperator mask_;
    Eigen::VectorXd y_;
    double gamma_;
    std::optional<Eigen::VectorXd> x_star_;
};

/// y = m (.) x_star, plus gamma * eps on observed coordinates when noisy.
/// An all-zero mask is accepted with a warning on stderr.
InpaintingProblem make_observation(const Eigen::VectorXd& x_star, const MaskOperator& mask,
                                   double gamma, RandomStream& rng, bool noisy = false);

/// -||y - m (.) x0||^2 / (2 gamma^2); the normalizing constant is dropped.
double log_likelihood(const InpaintingProblem& problem, const Eigen::VectorXd& x0);

}  // namespace ding
