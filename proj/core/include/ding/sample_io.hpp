#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>

#include <Eigen/Core>

namespace ding {

/// .dsmp sample files: magic "DING1", then d and n as uint32 little endian,
/// then n rows of d float64 little endian values.
void write_dsmp(std::ostream& out, const Eigen::MatrixXd& samples);
Eigen::MatrixXd read_dsmp(std::istream& in);

void write_dsmp(const std::filesystem::path& path, const Eigen::MatrixXd& samples);
Eigen::MatrixXd read_dsmp(const std::filesystem::path& path);

namespace le {

void put_u32(std::ostream& out, std::uint32_t v);
void put_f64(std::ostream& out, double v);
std::uint32_t get_u32(std::istream& in);
double get_f64(std::istream& in);

}  // namespace le

}  // namespace ding
