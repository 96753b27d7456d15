#include "ding/random.hpp"

namespace ding {

namespace {

// splitmix64 finalizer
std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Eigen::VectorXd RandomStream::gaussian(Eigen::Index n) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = normal_(engine_);
    }
    return out;
}

std::uint64_t hash_label(std::string_view label) {
    // FNV-1a, 64 bit
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t label_hash, std::uint64_t index) {
    return splitmix(splitmix(splitmix(master) ^ label_hash) ^ index);
}

RandomStream derive_stream(std::uint64_t master, std::string_view label, std::uint64_t index) {
    return RandomStream(mix_seed(master, hash_label(label), index));
}

}  // namespace ding
