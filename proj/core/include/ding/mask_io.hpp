#pragma once

#include <filesystem>
#include <vector>

#include "ding/masklift.hpp"

namespace ding {

/// Binary PGM (P5), 8-bit. Pixels >= 128 are observed (1), others edited (0).
BinaryVolume read_pgm(const std::filesystem::path& path);
/// Several single-frame PGMs of equal size stacked along the frame axis.
BinaryVolume read_pgm_frames(const std::vector<std::filesystem::path>& paths);
/// Writes one frame; observed = 255, edited = 0.
void write_pgm(const std::filesystem::path& path, const BinaryVolume& mask, std::size_t frame = 0);

/// Multi-frame raw mask: "DMSK", frames/height/width as uint32 little endian,
/// then frames*height*width bytes (0 or 1), row-major.
BinaryVolume read_dmsk(const std::filesystem::path& path);
void write_dmsk(const std::filesystem::path& path, const BinaryVolume& mask);

}  // namespace ding
