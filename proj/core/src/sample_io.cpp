#include "ding/sample_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "ding/error.hpp"

namespace ding {

namespace {

constexpr std::array<char, 5> kMagic = {'D', 'I', 'N', 'G', '1'};

}  // namespace

namespace le {

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (std::size_t i = 0; i < 4; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (std::size_t i = 0; i < 8; ++i) {
        b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    }
    out.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), b.size());
    require(static_cast<bool>(in), ErrorKind::Io, "unexpected end of file");
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    }
    return v;
}

double get_f64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), b.size());
    require(static_cast<bool>(in), ErrorKind::Io, "unexpected end of file");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return std::bit_cast<double>(bits);
}

}  // namespace le

void write_dsmp(std::ostream& out, const Eigen::MatrixXd& samples) {
    constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
    require(samples.cols() <= kMax && samples.rows() <= kMax, ErrorKind::InvalidParameter,
            "sample matrix too large for the .dsmp header");
    out.write(kMagic.data(), kMagic.size());
    le::put_u32(out, static_cast<std::uint32_t>(samples.cols()));
    le::put_u32(out, static_cast<std::uint32_t>(samples.rows()));
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        for (Eigen::Index j = 0; j < samples.cols(); ++j) {
            le::put_f64(out, samples(i, j));
        }
    }
    require(static_cast<bool>(out), ErrorKind::Io, "failed to write sample data");
}

Eigen::MatrixXd read_dsmp(std::istream& in) {
    std::array<char, 5> magic{};
    in.read(magic.data(), magic.size());
    require(static_cast<bool>(in) && magic == kMagic, ErrorKind::Io,
            "not a .dsmp file (bad magic)");
    const std::uint32_t d = le::get_u32(in);
    const std::uint32_t n = le::get_u32(in);
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        for (Eigen::Index j = 0; j < samples.cols(); ++j) {
            samples(i, j) = le::get_f64(in);
        }
    }
    return samples;
}

void write_dsmp(const std::filesystem::path& path, const Eigen::MatrixXd& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) {
        fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    }
    write_dsmp(out, samples);
}

Eigen::MatrixXd read_dsmp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        fail(ErrorKind::Io, "cannot open " + path.string());
    }
    return read_dsmp(in);
}

}  // namespace ding
