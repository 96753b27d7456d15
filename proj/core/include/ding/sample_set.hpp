#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace ding {

struct Provenance {
    std::string method;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

/// n x d matrix of terminal chain states, one sample per row.
struct SampleSet {
    Eigen::MatrixXd samples;
    Provenance provenance;

    Eigen::Index size() const { return samples.rows(); }
    Eigen::Index dim() const { return samples.cols(); }
};

}  // namespace ding
