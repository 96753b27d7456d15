#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace ding {

/// A seeded Mersenne-Twister stream with its own Gaussian generator state.
///
/// Streams are never shared between chains. Each chain derives its stream from
/// (master seed, label, index), so the samples of one chain do not depend on
/// how many other chains or methods were run before it, nor on thread
/// scheduling.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    Eigen::VectorXd gaussian(Eigen::Index n);
    double uniform() { return uniform_(engine_); }
    std::uint64_t bits() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t hash_label(std::string_view label);
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t label_hash, std::uint64_t index);

RandomStream derive_stream(std::uint64_t master, std::string_view label, std::uint64_t index);

}  // namespace ding
